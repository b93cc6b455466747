#pragma once

#include <memory>
#include <string>
#include <vector>

namespace subray {

enum class PsfKind { kGaussian, kSinc, kCustomSampled };

/// Normalized real amplitude point-spread function with its cached
/// root-mean-square spatial bandwidth.
///
/// Conventions fixed here:
///   gaussian:  psi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / 4 sigma^2),
///              delta_k = 1 / (2 sigma).
///   sinc:      psi(x) = sqrt(W/pi) sin(Wx)/(Wx), flat spectrum on [-W, W],
///              delta_k = W / sqrt(3).
class Psf {
 public:
  static Psf gaussian(double sigma);
  static Psf sinc(double k_halfwidth);
  /// Uniformly sampled amplitude, renormalized to unit L2 norm on load.
  static Psf from_samples(std::vector<double> positions,
                          std::vector<double> amplitudes);
  /// Two-column text file with header "# psf v1".
  static Psf load(const std::string& path);

  PsfKind kind() const { return kind_; }
  double width_param() const { return width_; }
  double delta_k() const { return delta_k_; }

  /// Amplitude psi(x).
  double operator()(double x) const;
  /// d psi / dx.
  double derivative(double x) const;

  /// overlap(a, b) = int psi(x-a) psi(x-b) dx.
  double overlap(double a, double b) const;
  /// int psi'(x-a) psi'(x-b) dx.
  double derivative_overlap(double a, double b) const;

  /// Radius beyond which the amplitude is numerically negligible (used to
  /// truncate position-space quadrature). Gaussian: 10 sigma + extra.
  double domain_halfwidth(double extra = 0.0) const;

 private:
  Psf() = default;
  PsfKind kind_ = PsfKind::kGaussian;
  double width_ = 1.0;
  double delta_k_ = 1.0;
  // sampled representation (kCustomSampled)
  std::shared_ptr<const std::vector<double>> grid_x_;
  std::shared_ptr<const std::vector<double>> grid_a_;
  double grid_dx_ = 0.0;
  double sample_interp(double x) const;
  double sample_interp_derivative(double x) const;
};

/// Root-mean-square spatial bandwidth [int |dpsi/dx|^2 dx]^{1/2}, recomputed
/// from the evaluation map (k-space for the sinc kind, whose position-space
/// tails decay too slowly for direct quadrature).
double rms_bandwidth(const Psf& psf);

}  // namespace subray
