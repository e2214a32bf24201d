#pragma once

/**
 * @file zxmap.hpp
 * @brief Time-instance zero-crossing (TI ZX) forward mapping.
 *
 * Input bits are grouped into blocks; each block selects a row g_i of the
 * positive coefficient matrix G and a fixed sign pattern. The emitted segment
 * is rho * signs[i] .* g_i, where rho is the sign of the last emitted sample
 * (the pilot rho_b for the first block). The same rules written as a Moore
 * machine give the exact second-order statistics used by the spectrum module.
 *
 * Supported oversampling factors:
 *   m_rx = 3: 2 bits -> 3 samples, 4 patterns, 8 states
 *   m_rx = 2: 3 bits -> 4 samples (two Nyquist intervals), 8 patterns, 16 states
 */

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tizx {

enum class Polarity : int8_t { Minus = -1, Plus = 1 };

inline int to_int(Polarity p) { return static_cast<int>(p); }
inline Polarity flip(Polarity p) { return p == Polarity::Plus ? Polarity::Minus : Polarity::Plus; }
inline Polarity polarity_of(int sign) { return sign < 0 ? Polarity::Minus : Polarity::Plus; }

using SignVector = std::vector<int8_t>;
using BitVector = std::vector<uint8_t>;

struct ZxParams {
    int m_rx = 3;
    int q = 3;                // samples per mapped block
    int bits_per_block = 2;
    int patterns = 4;         // number of positive-polarity output rows
    int n_states() const { return 2 * patterns; }
    int m_coeff() const { return patterns * q; }

    /// Throws ConfigError for anything other than m_rx in {2, 3}.
    static ZxParams for_oversampling(int m_rx);

    bool operator==(const ZxParams&) const = default;
};

/// Sign patterns of the positive-polarity rows plus their Gray bit labels.
struct SignTable {
    ZxParams params;
    Eigen::MatrixXi signs;          // patterns x q, entries +-1
    std::vector<unsigned> labels;   // labels[i] = bit label of row i (MSB = first bit)
    std::vector<int> next_polarity; // sign of the last sample of each row

    /// Row index for a bit label; the inverse of `labels`.
    int row_for_label(unsigned label) const;
};

const SignTable& sign_table(int m_rx);
SignTable build_sign_tables(const ZxParams& params);

/**
 * Positive waveform coefficients, one row g_i per output pattern.
 *
 * Entries must be strictly positive; the negative set is implied as -G.
 * When an energy budget is given, ||G||_F^2 must not exceed it.
 */
class CoefficientSet {
public:
    CoefficientSet(const ZxParams& params, Eigen::MatrixXd g);
    CoefficientSet(const ZxParams& params, Eigen::MatrixXd g, double energy_budget);

    const ZxParams& params() const { return params_; }
    const Eigen::MatrixXd& matrix() const { return g_; }
    double norm_sq() const { return g_.squaredNorm(); }
    double min_entry() const { return g_.minCoeff(); }

    /// Row-major flattening, g_{1,1} .. g_{1,q}, g_{2,1}, ...
    Eigen::VectorXd flattened() const;
    static CoefficientSet from_flat(const ZxParams& params, const Eigen::VectorXd& flat);

    CoefficientSet scaled(double alpha) const;

private:
    ZxParams params_;
    Eigen::MatrixXd g_;
};

/// Plain-text matrix: one row per g_i, space separated.
std::string format_coefficients(const CoefficientSet& coeffs);
CoefficientSet parse_coefficients(const std::string& text);
CoefficientSet load_coefficients(const std::string& path);

struct MooreMachine {
    ZxParams params;
    // States 0..patterns-1 are i+ and patterns..2*patterns-1 are i-.
    std::vector<std::vector<int>> transition;  // [state][label column] -> next state
    Eigen::MatrixXd q_matrix;                  // row stochastic transition probabilities
    Eigen::MatrixXd gamma;                     // signed output row of each state
    Eigen::VectorXd pi;                        // stationary distribution

    int n_states() const { return params.n_states(); }
    double transition_probability() const { return 1.0 / params.patterns; }
};

MooreMachine build_machine(const CoefficientSet& coeffs);

/// Same as above for an arbitrary real matrix; used where zero entries are
/// needed (quadratic-form assembly in the optimizer).
MooreMachine build_machine(const ZxParams& params, const Eigen::MatrixXd& g);

struct EncodedFrame {
    std::vector<double> coeffs;  // signed coefficient per oversampled sample
    SignVector signs;            // sign of each sample (concatenated block codewords)
    std::vector<int> rows;       // selected row per block
    Polarity rho_b = Polarity::Plus;
    std::size_t bit_count = 0;
    int m_rx = 0;

    std::size_t block_count() const { return rows.size(); }
};

/// Real-rail encoder. The pilot rho_b is not emitted.
EncodedFrame encode(std::span<const uint8_t> bits, Polarity rho_b, const CoefficientSet& coeffs);

/// Real and imaginary rails of one user frame.
struct ComplexFrame {
    EncodedFrame re;
    EncodedFrame im;
};

/// Blocks alternate between rails: even-indexed blocks go to the real rail,
/// odd-indexed blocks to the imaginary rail.
ComplexFrame encode_complex(std::span<const uint8_t> bits, Polarity rho_b_re, Polarity rho_b_im,
                            const CoefficientSet& coeffs);

/// Inverse of the rail split done by encode_complex.
BitVector interleave_rails(std::span<const uint8_t> re_bits, std::span<const uint8_t> im_bits,
                           int bits_per_block);

struct CodebookEntry {
    unsigned label;
    int row;
    SignVector codeword;
};

/// Valid sign codewords for a given entering polarity, in table row order.
std::vector<CodebookEntry> sign_codebook(const ZxParams& params, Polarity entering);

std::string label_string(unsigned label, int bits);

}  // namespace tizx
