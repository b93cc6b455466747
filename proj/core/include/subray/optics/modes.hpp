#pragma once

#include <vector>

#include "subray/optics/psf.hpp"

namespace subray {

enum class BasisKind {
  kHermiteGaussian,
  kParity,          // even/odd aggregate channels
  kInterleavedHg,   // disjoint neighbor-pair superpositions
  kPsfAdaptedSampled
};

/// Ordered orthonormal transverse mode set with a finite cutoff; everything
/// beyond the cutoff lands in one distinguishable bucket channel.
struct ModeBasis {
  BasisKind kind = BasisKind::kHermiteGaussian;
  double scale = 0.5;       // sigma of the HG envelope
  int cutoff = 20;          // max retained mode index M
  int dimensionality = 1;
  int interleave_offset = 0;  // 0: pairs (0,1),(2,3).. ; 1: {0},(1,2),(3,4)..

  static ModeBasis hermite_gaussian(double scale, int cutoff = 20,
                                    int dimensionality = 1) {
    return ModeBasis{BasisKind::kHermiteGaussian, scale, cutoff,
                     dimensionality, 0};
  }
  static ModeBasis interleaved(double scale, int cutoff, int offset) {
    return ModeBasis{BasisKind::kInterleavedHg, scale, cutoff, 1, offset};
  }
};

/// n-th Hermite-Gaussian mode function, orthonormal on the line; n = 0
/// coincides with the Gaussian PSF of the same sigma.
double hg_mode(int n, double scale, double x);

/// Displaced-PSF amplitude a_n(d) = int phi_n(x) psi(x - d) dx.
/// Closed form (coherent-state expansion) when the PSF is Gaussian and the
/// basis scale matches; quadrature otherwise.
double displaced_amplitude(const Psf& psf, const ModeBasis& basis, int n,
                           double d);

/// Amplitudes a[n][j] for a set of displacements plus per-displacement
/// leakage 1 - sum_n a^2.
struct OverlapTable {
  ModeBasis basis;
  std::vector<double> displacements;
  std::vector<std::vector<double>> amplitudes;  // [n][j]
  std::vector<double> leakage;                  // [j]
};

OverlapTable make_overlap_table(const Psf& psf, const ModeBasis& basis,
                                const std::vector<double>& displacements);

/// Mode-count probabilities p[n] = a_n(d)^2 for n = 0..M plus trailing
/// leakage entry. For a matched Gaussian/HG pair this is the Poisson law
/// p[n] = e^{-Q} Q^n / n!, Q = (d delta_k)^2.
std::vector<double> displaced_mode_probabilities(const Psf& psf,
                                                 const ModeBasis& basis,
                                                 double d);

/// Probabilities for one interleaved configuration: each retained pair
/// (n, n+1) maps to two outcomes |<(phi_n +- phi_{n+1})/sqrt2 | psi_d>|^2;
/// an unpaired leading/trailing index keeps its plain HG outcome.
/// Outcome order: ascending n, '+' before '-', bucket last.
std::vector<double> interleaved_mode_probabilities(const Psf& psf,
                                                   const ModeBasis& basis,
                                                   double d);

}  // namespace subray
