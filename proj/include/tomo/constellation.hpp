#pragma once

#include <cstdint>
#include <vector>

namespace tomo {

// Real M-PAM symbol set {-(M-1), ..., -1, +1, ..., +(M-1)} in increasing
// order, with reflected Gray bit labels. Amplitudes follow the odd-integer
// convention with spacing 2 and no energy normalization; the SNR mapping
// absorbs the energy difference between constellation sizes.
struct Constellation {
  std::vector<double> symbols;
  int bits_per_symbol = 0;
  std::vector<std::uint32_t> labels;  // Gray label of each symbol index

  int size() const { return static_cast<int>(symbols.size()); }

  // Mean squared amplitude, (M^2 - 1) / 3 for M-PAM.
  double energy() const;

  // Index of the nearest symbol; exact midpoints resolve to the smaller
  // symbol so slicing is deterministic.
  int slice_index(double v) const;

  // Bit b of the Gray label for a symbol index, most significant bit first.
  int bit(int symbol_index, int b) const;
};

// Throws std::invalid_argument unless m is a power of two and m >= 2.
Constellation make_constellation(int m);

}  // namespace tomo
