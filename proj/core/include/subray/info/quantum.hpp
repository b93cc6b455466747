#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "subray/optics/psf.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

/// Rank-limited mixture of displaced-PSF pure states: the single-photon
/// model rho(theta) = sum_k w_k |psi_{d_k}><psi_{d_k}|.
struct MixtureStateModel {
  Psf psf;
  std::function<std::vector<WeightedDisplacement>(double)> components;

  /// Localization model: one source at position theta.
  static MixtureStateModel localization(const Psf& psf);
  /// Equal pair at -+ theta/2.
  static MixtureStateModel separation_pair(const Psf& psf);
  /// Star at 0 plus companion of relative brightness b at theta.
  static MixtureStateModel dim_companion(const Psf& psf, double b);
};

/// Gaussian coherent-state family alpha(x|theta) =
/// a1 psi(x - theta/2) + a2 psi(x + theta/2) with deterministic amplitudes.
struct CoherentPairStateModel {
  Psf psf;
  std::complex<double> amp1;
  std::complex<double> amp2;
};

/// Uhlmann fidelity between mixture states at two parameter values, via the
/// Gram-matrix reduction: F = (sum_i sqrt(lambda_i(rho1 rho2)))^2 with the
/// nonzero spectrum of rho1 rho2 obtained from a rank-sized matrix of
/// pairwise PSF overlaps.
double mixture_fidelity(const MixtureStateModel& model, double theta1,
                        double theta2);

/// |<alpha(theta1)|alpha(theta2)>|^2 = exp(-int |alpha1 - alpha2|^2 dx).
double coherent_fidelity(const CoherentPairStateModel& model, double theta1,
                         double theta2);

/// QFI from the fidelity curvature: -2 d^2F/dDtheta^2 at Dtheta = 0, central
/// second difference with one Richardson step; F(theta0, theta0) = 1 is
/// enforced. Throws when the step is too small to resolve the curvature.
double qfi_from_fidelity(const std::function<double(double, double)>& fidelity,
                         double theta0, double step);

double qfi_from_fidelity(const MixtureStateModel& model, double theta0,
                         double step);
double qfi_from_fidelity(const CoherentPairStateModel& model, double theta0,
                         double step);

/// kappa(theta) = (1/dk^2) int psi'(x - theta/2) psi'(x + theta/2) dx.
double kappa(const Psf& psf, double theta);

/// Convexity upper bound on the partial-coherence QFI:
/// N dk^2 (1 - Re[gamma kappa(theta)]).
double qfi_partial_coherence_bound(std::complex<double> gamma, double theta,
                                   const Psf& psf, double n_photons);

/// Three-dimensional localization QCRB for a Gaussian aperture:
/// (1/N) diag(1/dk^2, 1/dk^2, k^2/dk^4).
Eigen::Matrix3d qcrb_3d(double delta_k, double wavenumber, double n_photons);

}  // namespace subray
