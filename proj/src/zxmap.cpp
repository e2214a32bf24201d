#include "tizx/zxmap.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tizx/errors.hpp"

namespace tizx {

ZxParams ZxParams::for_oversampling(int m_rx)
{
    switch (m_rx) {
    case 3: return ZxParams{3, 3, 2, 4};
    case 2: return ZxParams{2, 4, 3, 8};
    default: throw ConfigError("unsupported oversampling factor m_rx=" + std::to_string(m_rx));
    }
}

int SignTable::row_for_label(unsigned label) const
{
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        throw InputError("bit label " + std::to_string(label) + " not in table");
    return static_cast<int>(it - labels.begin());
}

SignTable build_sign_tables(const ZxParams& params)
{
    SignTable t;
    t.params = params;
    if (params.m_rx == 3 && params == ZxParams::for_oversampling(3)) {
        t.signs.resize(4, 3);
        t.signs << 1, 1, 1,
                   1, 1, -1,
                   1, -1, -1,
                  -1, -1, -1;
        t.labels = {0b00, 0b01, 0b11, 0b10};
    } else if (params.m_rx == 2 && params == ZxParams::for_oversampling(2)) {
        t.signs.resize(8, 4);
        t.signs << 1, 1, 1, 1,
                   1, 1, 1, -1,
                   1, 1, -1, -1,
                   1, -1, -1, -1,
                   1, -1, -1, 1,
                  -1, -1, -1, 1,
                  -1, -1, -1, -1,
                  -1, -1, 1, 1;
        t.labels = {0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100};
    } else {
        throw ConfigError("unsupported oversampling factor m_rx=" + std::to_string(params.m_rx));
    }
    t.next_polarity.resize(t.signs.rows());
    for (int i = 0; i < t.signs.rows(); ++i)
        t.next_polarity[i] = t.signs(i, params.q - 1);
    return t;
}

const SignTable& sign_table(int m_rx)
{
    static const SignTable t2 = build_sign_tables(ZxParams::for_oversampling(2));
    static const SignTable t3 = build_sign_tables(ZxParams::for_oversampling(3));
    if (m_rx == 2) return t2;
    if (m_rx == 3) return t3;
    throw ConfigError("unsupported oversampling factor m_rx=" + std::to_string(m_rx));
}

// ---------------------------------------------------------------------------

namespace {

void check_shape(const ZxParams& params, const Eigen::MatrixXd& g)
{
    if (g.rows() != params.patterns || g.cols() != params.q) {
        std::ostringstream os;
        os << "coefficient matrix is " << g.rows() << "x" << g.cols() << ", expected "
           << params.patterns << "x" << params.q << " for m_rx=" << params.m_rx;
        throw InputError(os.str());
    }
}

}  // namespace

CoefficientSet::CoefficientSet(const ZxParams& params, Eigen::MatrixXd g)
    : params_(params), g_(std::move(g))
{
    check_shape(params_, g_);
    if (!(g_.array() > 0.0).all())
        throw InputError("coefficients must be strictly positive");
}

CoefficientSet::CoefficientSet(const ZxParams& params, Eigen::MatrixXd g, double energy_budget)
    : CoefficientSet(params, std::move(g))
{
    if (norm_sq() > energy_budget)
        throw InputError("coefficient energy " + std::to_string(norm_sq()) + " exceeds budget " +
                         std::to_string(energy_budget));
}

Eigen::VectorXd CoefficientSet::flattened() const
{
    Eigen::VectorXd v(g_.size());
    for (int i = 0; i < g_.rows(); ++i)
        for (int j = 0; j < g_.cols(); ++j)
            v(i * g_.cols() + j) = g_(i, j);
    return v;
}

CoefficientSet CoefficientSet::from_flat(const ZxParams& params, const Eigen::VectorXd& flat)
{
    if (flat.size() != params.m_coeff())
        throw InputError("flat coefficient vector has wrong length");
    Eigen::MatrixXd g(params.patterns, params.q);
    for (int i = 0; i < params.patterns; ++i)
        for (int j = 0; j < params.q; ++j)
            g(i, j) = flat(i * params.q + j);
    return CoefficientSet(params, std::move(g));
}

CoefficientSet CoefficientSet::scaled(double alpha) const
{
    return CoefficientSet(params_, g_ * alpha);
}

std::string format_coefficients(const CoefficientSet& coeffs)
{
    std::ostringstream os;
    os << std::setprecision(17);
    const auto& g = coeffs.matrix();
    for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j)
            os << (j ? " " : "") << g(i, j);
        os << '\n';
    }
    return os.str();
}

CoefficientSet parse_coefficients(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("bad coefficient value '" + tok + "'");
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("coefficient matrix is empty");
    const auto cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols) throw ConfigError("coefficient rows have different lengths");

    int m_rx = 0;
    if (rows.size() == 4 && cols == 3) m_rx = 3;
    else if (rows.size() == 8 && cols == 4) m_rx = 2;
    else throw ConfigError("coefficient matrix shape matches no supported m_rx");

    Eigen::MatrixXd g(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            g(i, j) = rows[i][j];
    try {
        return CoefficientSet(ZxParams::for_oversampling(m_rx), std::move(g));
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
}

CoefficientSet load_coefficients(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coefficient file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_coefficients(ss.str());
}

// ---------------------------------------------------------------------------

MooreMachine build_machine(const ZxParams& params, const Eigen::MatrixXd& g)
{
    check_shape(params, g);
    const SignTable& table = sign_table(params.m_rx);
    const int n = params.patterns;

    MooreMachine mm;
    mm.params = params;
    mm.transition.assign(2 * n, std::vector<int>(n));
    mm.q_matrix = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    mm.gamma.resize(2 * n, params.q);
    mm.pi = Eigen::VectorXd::Constant(2 * n, 1.0 / (2 * n));

    const double p = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const Eigen::RowVectorXd row = table.signs.row(i).cast<double>().cwiseProduct(g.row(i));
        mm.gamma.row(i) = row;
        mm.gamma.row(n + i) = -row;
        for (int pol : {1, -1}) {
            const int state = pol > 0 ? i : n + i;
            const int exit_sign = pol * table.next_polarity[i];
            for (int j = 0; j < n; ++j) {
                const int next = exit_sign > 0 ? j : n + j;
                mm.transition[state][j] = next;
                mm.q_matrix(state, next) += p;
            }
        }
    }
    return mm;
}

MooreMachine build_machine(const CoefficientSet& coeffs)
{
    return build_machine(coeffs.params(), coeffs.matrix());
}

// ---------------------------------------------------------------------------

EncodedFrame encode(std::span<const uint8_t> bits, Polarity rho_b, const CoefficientSet& coeffs)
{
    const ZxParams& params = coeffs.params();
    const SignTable& table = sign_table(params.m_rx);
    const int k = params.bits_per_block;
    if (bits.size() % k != 0)
        throw InputError("bit count " + std::to_string(bits.size()) +
                         " is not a multiple of the block size " + std::to_string(k));

    const std::size_t blocks = bits.size() / k;
    EncodedFrame frame;
    frame.rho_b = rho_b;
    frame.bit_count = bits.size();
    frame.m_rx = params.m_rx;
    frame.coeffs.reserve(blocks * params.q);
    frame.signs.reserve(blocks * params.q);
    frame.rows.reserve(blocks);

    const auto& g = coeffs.matrix();
    int rho = to_int(rho_b);
    for (std::size_t b = 0; b < blocks; ++b) {
        unsigned label = 0;
        for (int i = 0; i < k; ++i)
            label = (label << 1) | (bits[b * k + i] & 1u);
        const int row = table.row_for_label(label);
        frame.rows.push_back(row);
        for (int j = 0; j < params.q; ++j) {
            const int s = rho * table.signs(row, j);
            frame.coeffs.push_back(s * g(row, j));
            frame.signs.push_back(static_cast<int8_t>(s));
        }
        rho *= table.next_polarity[row];
    }
    return frame;
}

ComplexFrame encode_complex(std::span<const uint8_t> bits, Polarity rho_b_re, Polarity rho_b_im,
                            const CoefficientSet& coeffs)
{
    const int k = coeffs.params().bits_per_block;
    if (bits.size() % k != 0)
        throw InputError("bit count is not a multiple of the block size");
    BitVector re, im;
    re.reserve(bits.size() / 2 + k);
    im.reserve(bits.size() / 2 + k);
    const std::size_t blocks = bits.size() / k;
    for (std::size_t b = 0; b < blocks; ++b) {
        auto& dst = (b % 2 == 0) ? re : im;
        dst.insert(dst.end(), bits.begin() + b * k, bits.begin() + (b + 1) * k);
    }
    return ComplexFrame{encode(re, rho_b_re, coeffs), encode(im, rho_b_im, coeffs)};
}

BitVector interleave_rails(std::span<const uint8_t> re_bits, std::span<const uint8_t> im_bits,
                           int bits_per_block)
{
    const std::size_t k = bits_per_block;
    if (re_bits.size() % k || im_bits.size() % k)
        throw InputError("rail bit count is not a multiple of the block size");
    const std::size_t re_blocks = re_bits.size() / k;
    const std::size_t im_blocks = im_bits.size() / k;
    if (re_blocks != im_blocks && re_blocks != im_blocks + 1)
        throw InputError("rail lengths are inconsistent with block alternation");

    BitVector out;
    out.reserve(re_bits.size() + im_bits.size());
    for (std::size_t b = 0; b < re_blocks + im_blocks; ++b) {
        const auto& src = (b % 2 == 0) ? re_bits : im_bits;
        const std::size_t idx = b / 2;
        out.insert(out.end(), src.begin() + idx * k, src.begin() + (idx + 1) * k);
    }
    return out;
}

std::vector<CodebookEntry> sign_codebook(const ZxParams& params, Polarity entering)
{
    const SignTable& table = sign_table(params.m_rx);
    std::vector<CodebookEntry> book;
    book.reserve(params.patterns);
    for (int i = 0; i < params.patterns; ++i) {
        CodebookEntry e{table.labels[i], i, SignVector(params.q)};
        for (int j = 0; j < params.q; ++j)
            e.codeword[j] = static_cast<int8_t>(to_int(entering) * table.signs(i, j));
        book.push_back(std::move(e));
    }
    return book;
}

std::string label_string(unsigned label, int bits)
{
    std::string s(bits, '0');
    for (int i = 0; i < bits; ++i)
        if (label & (1u << (bits - 1 - i))) s[i] = '1';
    return s;
}

}  // namespace tizx
