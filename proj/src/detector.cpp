#include "tizx/detector.hpp"

#include <algorithm>

#include "tizx/errors.hpp"

namespace tizx {

int hamming(std::span<const int8_t> a, std::span<const int8_t> b)
{
    if (a.size() != b.size())
        throw InputError("hamming: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

SignVector DetectionWindow::extended() const
{
    SignVector z;
    z.reserve(block_signs.size() + 1);
    z.push_back(static_cast<int8_t>(to_int(rho_prev)));
    z.insert(z.end(), block_signs.begin(), block_signs.end());
    return z;
}

namespace {

void check_signs(std::span<const int8_t> s)
{
    for (auto v : s)
        if (v != 1 && v != -1) throw InputError("sign samples must be +1 or -1");
}

const std::vector<CodebookEntry>& cached_codebook(const ZxParams& params, Polarity p)
{
    static const std::vector<CodebookEntry> books[2][2] = {
        {sign_codebook(ZxParams::for_oversampling(2), Polarity::Minus),
         sign_codebook(ZxParams::for_oversampling(2), Polarity::Plus)},
        {sign_codebook(ZxParams::for_oversampling(3), Polarity::Minus),
         sign_codebook(ZxParams::for_oversampling(3), Polarity::Plus)},
    };
    if (params.m_rx != 2 && params.m_rx != 3)
        throw ConfigError("unsupported oversampling factor m_rx=" + std::to_string(params.m_rx));
    return books[params.m_rx - 2][p == Polarity::Plus ? 1 : 0];
}

}  // namespace

BlockDecision detect_block(const DetectionWindow& window, std::span<const CodebookEntry> codebook)
{
    if (codebook.empty()) throw InputError("empty codebook");
    check_signs(window.block_signs);
    const SignVector z = window.extended();

    BlockDecision best;
    best.distance = -1;
    SignVector c;
    for (const auto& e : codebook) {
        if (e.codeword.size() != window.block_signs.size())
            throw InputError("codeword length does not match the detection window");
        c.assign(1, static_cast<int8_t>(to_int(window.rho_prev)));
        c.insert(c.end(), e.codeword.begin(), e.codeword.end());
        const int d = hamming(z, c);
        if (best.distance < 0 || d < best.distance) {
            best.distance = d;
            best.label = e.label;
            best.row = e.row;
            best.codeword = c;
        }
    }
    return best;
}

BlockDecision detect_block(const DetectionWindow& window, const ZxParams& params)
{
    return detect_block(window, cached_codebook(params, window.rho_prev));
}

RailDetection detect_rail(std::span<const int8_t> signs, Polarity rho_b, const ZxParams& params,
                          PolarityChaining chaining)
{
    const auto q = static_cast<std::size_t>(params.q);
    if (signs.size() % q != 0)
        throw InputError("rail length " + std::to_string(signs.size()) +
                         " is not a multiple of q=" + std::to_string(q));
    const int k = params.bits_per_block;
    const std::size_t blocks = signs.size() / q;

    RailDetection out;
    out.bits.reserve(blocks * k);
    out.polarity.reserve(blocks);
    out.distances.reserve(blocks);

    DetectionWindow w;
    w.rho_prev = rho_b;
    w.block_signs.resize(q);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::copy(signs.begin() + b * q, signs.begin() + (b + 1) * q, w.block_signs.begin());
        const BlockDecision d = detect_block(w, cached_codebook(params, w.rho_prev));
        out.polarity.push_back(w.rho_prev);
        out.distances.push_back(d.distance);
        for (int i = k - 1; i >= 0; --i) out.bits.push_back((d.label >> i) & 1u);
        w.rho_prev = polarity_of(chaining == PolarityChaining::Raw ? w.block_signs.back()
                                                                    : d.codeword.back());
    }
    return out;
}

BitVector detect_frame(std::span<const int8_t> signs, Polarity rho_b, const ZxParams& params,
                       PolarityChaining chaining)
{
    return detect_rail(signs, rho_b, params, chaining).bits;
}

BitVector detect_complex_frame(std::span<const int8_t> re, std::span<const int8_t> im,
                               Polarity rho_b_re, Polarity rho_b_im, const ZxParams& params,
                               PolarityChaining chaining)
{
    const BitVector r = detect_frame(re, rho_b_re, params, chaining);
    const BitVector i = detect_frame(im, rho_b_im, params, chaining);
    return interleave_rails(r, i, params.bits_per_block);
}

}  // namespace tizx
