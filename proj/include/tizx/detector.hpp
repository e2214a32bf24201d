#pragma once

/**
 * @file detector.hpp
 * @brief Hamming-distance detection of TI ZX codewords from 1-bit samples.
 *
 * Each block of q received signs is compared, together with the sign that
 * precedes it, against the valid codewords for that entering polarity.
 */

#include <span>
#include <vector>

#include "tizx/zxmap.hpp"

namespace tizx {

/// Which sign is carried into the next window.
enum class PolarityChaining {
    Raw,       // last received sample of the block
    Detected,  // last sign of the detected codeword
};

/// Number of disagreeing positions. Throws InputError on a length mismatch.
int hamming(std::span<const int8_t> a, std::span<const int8_t> b);

struct DetectionWindow {
    Polarity rho_prev = Polarity::Plus;
    SignVector block_signs;

    /// [rho_prev, block_signs...]
    SignVector extended() const;
};

struct BlockDecision {
    unsigned label = 0;
    int row = 0;
    SignVector codeword;  // prepended with rho_prev
    int distance = 0;
};

/// Codebook must be sign_codebook(params, window.rho_prev). Ties go to the
/// lowest row.
BlockDecision detect_block(const DetectionWindow& window, std::span<const CodebookEntry> codebook);
BlockDecision detect_block(const DetectionWindow& window, const ZxParams& params);

struct RailDetection {
    BitVector bits;
    std::vector<Polarity> polarity;  // entering polarity of each block
    std::vector<int> distances;
};

/// Sequential detection of one rail. Length must be a multiple of q.
RailDetection detect_rail(std::span<const int8_t> signs, Polarity rho_b, const ZxParams& params,
                          PolarityChaining chaining = PolarityChaining::Raw);

BitVector detect_frame(std::span<const int8_t> signs, Polarity rho_b, const ZxParams& params,
                       PolarityChaining chaining = PolarityChaining::Raw);

/// Both rails detected independently, then re-interleaved as encode_complex split them.
BitVector detect_complex_frame(std::span<const int8_t> re, std::span<const int8_t> im,
                               Polarity rho_b_re, Polarity rho_b_im, const ZxParams& params,
                               PolarityChaining chaining = PolarityChaining::Raw);

}  // namespace tizx
