#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace subray {

/// Two incoherent point sources at centroid -+ theta/2. brightness_split is
/// the photon fraction from source 2 (the one at centroid + theta/2);
/// 0.5 means equal brightness, b -> 0 is the dim-companion limit.
struct TwoPointScene {
  double centroid = 0.0;
  double separation = 0.0;
  double brightness_split = 0.5;

  TwoPointScene() = default;
  TwoPointScene(double centroid_, double separation_,
                double brightness_split_ = 0.5);
};

/// Two mutually coherent sources with complex degree of coherence gamma and
/// mean photon number per observation window N (emitted convention).
struct CoherentPairScene {
  double separation = 0.0;
  double mean_photons = 1.0;
  std::complex<double> gamma{0.0, 0.0};

  CoherentPairScene() = default;
  CoherentPairScene(double separation_, double mean_photons_,
                    std::complex<double> gamma_);
};

struct Emitter {
  double x = 0.0;
  double y = 0.0;
  double brightness = 1.0;
};

/// Point-emitter constellation; brightnesses sum to one.
struct Constellation {
  std::vector<Emitter> emitters;
  int dimensionality = 1;

  static Constellation points1d(const std::vector<double>& positions,
                                const std::vector<double>& brightness);
  void validate() const;
};

/// Non-negative intensity mass on a uniform pixel grid, summing to one.
/// Pixel (i, j) sits at (x0 + i*pitch, y0 + j*pitch).
struct IntensityGrid {
  int width = 0;
  int height = 0;
  double pixel_pitch = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> values;  // row-major, width*height, unit sum

  double at(int i, int j) const { return values[j * width + i]; }
  double& at(int i, int j) { return values[j * width + i]; }
  double x_of(int i) const { return x0 + i * pixel_pitch; }
  double y_of(int j) const { return y0 + j * pixel_pitch; }

  void validate() const;
  void normalize();

  /// 8-bit portable graymap (P2 or P5), normalized to unit sum; pixel (0,0)
  /// of the file maps to the top-left, stored bottom-up so +y points up.
  static IntensityGrid load_pgm(const std::string& path, double pixel_pitch,
                                double center_x = 0.0, double center_y = 0.0);
  void save_pgm(const std::string& path) const;
};

struct WeightedDisplacement {
  double weight;
  double displacement;
};

/// Incoherent mixture decomposition of a 1D scene: non-negative weights
/// summing to one, one displacement per component.
std::vector<WeightedDisplacement> mixture_components(const TwoPointScene& s);
std::vector<WeightedDisplacement> mixture_components(const Constellation& c);

/// Centroid-referenced second moments (m_x2, m_y2) of a grid intensity.
std::pair<double, double> second_moments(const IntensityGrid& grid);

/// Origin-referenced second moments, used by the leading-order Chernoff
/// estimates where objects share a common frame.
std::pair<double, double> second_moments_about_origin(const IntensityGrid& g);

/// Key-value scene description ("scene v1"). Holds exactly one scene type.
using SceneVariant = std::variant<TwoPointScene, CoherentPairScene, Constellation>;
SceneVariant load_scene(const std::string& path);
void save_scene(const SceneVariant& scene, const std::string& path);

}  // namespace subray
