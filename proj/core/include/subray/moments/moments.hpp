#pragma once

#include <vector>

#include "subray/measure/sampling.hpp"
#include "subray/optics/modes.hpp"
#include "subray/scene/scene.hpp"

namespace subray {

/// Real amplitude distribution on a uniform grid (coherent objects).
struct FieldGrid {
  int width = 0;
  int height = 0;
  double pixel_pitch = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> values;  // row-major

  double at(int i, int j) const { return values[j * width + i]; }
  double x_of(int i) const { return x0 + i * pixel_pitch; }
  double y_of(int j) const { return y0 + j * pixel_pitch; }
};

/// Amplitude coupled into HG_mn by a coherent object field:
/// J_mn = (1/sqrt(m! n!)) sum E(x,y) (x dk)^m (y dk)^n e^{-dk^2(x^2+y^2)/2}.
/// The kernel is the displaced-Gaussian amplitude, so |kernel|^2 matches the
/// intensity-moment kernel exactly.
double coherent_moment(const FieldGrid& field, int m, int n, double delta_k);

/// Intensity coupled into HG_mn by an incoherent object:
/// P_mn = (1/(m! n!)) sum I(x,y) (x dk)^{2m} (y dk)^{2n} e^{-dk^2(x^2+y^2)}.
double incoherent_moment(const IntensityGrid& grid, int m, int n,
                         double delta_k);

/// 1D odd-kernel expectation measured by an interleaved pair (n, n+1):
/// O_n = 2/sqrt(n!(n+1)!) sum I(x) (x dk)^{2n+1} e^{-dk^2 x^2}.
double interleaved_odd_moment(const Constellation& scene, int n,
                              double delta_k);

enum class MomentParity { kEven, kOdd };

struct MomentEstimate {
  int m = 0;
  int n = 0;
  MomentParity parity = MomentParity::kEven;
  double value = 0.0;
  double std_error = 0.0;
};

struct MomentSet {
  std::vector<MomentEstimate> entries;
  bool interleaved_available = false;  // odd kernels measured

  const MomentEstimate* find(int m, int n,
                             MomentParity parity = MomentParity::kEven) const;
};

/// Empirical moments from a 2D SPADE record (grid_spade_pmf_2d layout):
/// P_hat = counts / N with binomial standard errors. Without interleaved
/// data the set carries even kernels only.
MomentSet estimate_moments(const DetectionRecord& record, int cutoff);

/// Folds odd-kernel estimates from a 1D interleaved record into the set;
/// pair outcomes are (counts[+] - counts[-]) / N per retained pair.
void add_interleaved_moments(MomentSet& set, const DetectionRecord& record,
                             const ModeBasis& basis);

}  // namespace subray
