#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ghzsim {

using complexd = std::complex<double>;

/// Point estimate with a one-standard-deviation error bar.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

/// A measurement or channel was asked to operate outside the regime the
/// compact branch-pair representation supports (route to the full oracle).
struct UnsupportedConfiguration : std::logic_error {
  using std::logic_error::logic_error;
};

/// A least-squares fit failed to converge; the message carries diagnostics.
struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent experiment configuration (field named in message).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Basis states are labelled by reading the ket left to right as a binary
// numeral: |00001111> -> 15. Bit value 1 is the S ground state, 0 the
// metastable D state.
using Bitstring = std::uint32_t;

inline int bit_weight(Bitstring s) { return std::popcount(s); }

inline int parity_sign(Bitstring s) { return (std::popcount(s) & 1) ? -1 : 1; }

inline std::string bits_to_string(Bitstring s, int n) {
  std::string out(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if ((s >> (n - 1 - i)) & 1u) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

inline Bitstring bits_from_string(std::string_view text) {
  Bitstring s = 0;
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0/1");
    s = (s << 1) | static_cast<Bitstring>(c == '1');
  }
  return s;
}

}  // namespace ghzsim
