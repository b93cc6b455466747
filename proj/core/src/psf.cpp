#include "subray/optics/psf.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "subray/math/quadrature.hpp"
#include "subray/math/special.hpp"

namespace subray {

namespace {

double sinc_value(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

// d/du [sin(u)/u]
double sinc_derivative(double u) {
  if (std::abs(u) < 1e-6) return -u / 3.0 + u * u * u / 30.0;
  return (u * std::cos(u) - std::sin(u)) / (u * u);
}

// (1/W) int_0^W k^2 cos(k u) dk  =  int k^2 |psi_tilde(k)|^2 e^{iku} dk
double sinc_derivative_overlap(double w, double u) {
  if (std::abs(w * u) < 1e-6) return w * w / 3.0 * (1.0 - (w * u) * (w * u) / 10.0);
  const double s = std::sin(w * u), c = std::cos(w * u);
  return ((w * w * u * u - 2.0) * s + 2.0 * w * u * c) / (w * u * u * u);
}

}  // namespace

Psf Psf::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian PSF requires sigma > 0");
  Psf p;
  p.kind_ = PsfKind::kGaussian;
  p.width_ = sigma;
  p.delta_k_ = 1.0 / (2.0 * sigma);
  return p;
}

Psf Psf::sinc(double k_halfwidth) {
  if (!(k_halfwidth > 0.0))
    throw std::invalid_argument("sinc PSF requires k-halfwidth > 0");
  Psf p;
  p.kind_ = PsfKind::kSinc;
  p.width_ = k_halfwidth;
  p.delta_k_ = k_halfwidth / std::sqrt(3.0);
  return p;
}

Psf Psf::from_samples(std::vector<double> positions,
                      std::vector<double> amplitudes) {
  if (positions.size() != amplitudes.size() || positions.size() < 8)
    throw std::invalid_argument("sampled PSF needs >= 8 matching samples");
  const double dx = positions[1] - positions[0];
  if (!(dx > 0.0)) throw std::invalid_argument("sampled PSF grid must ascend");
  for (size_t i = 1; i + 1 < positions.size(); ++i) {
    const double step = positions[i + 1] - positions[i];
    if (std::abs(step - dx) > 1e-9 * std::abs(dx))
      throw std::invalid_argument("sampled PSF grid must be uniform");
  }
  // Renormalize to unit L2 norm (trapezoid on the grid).
  double norm2 = 0.0;
  for (size_t i = 0; i < amplitudes.size(); ++i) {
    const double w = (i == 0 || i + 1 == amplitudes.size()) ? 0.5 : 1.0;
    norm2 += w * amplitudes[i] * amplitudes[i] * dx;
  }
  if (!(norm2 > 0.0)) throw std::invalid_argument("sampled PSF has zero norm");
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& a : amplitudes) a *= scale;

  Psf p;
  p.kind_ = PsfKind::kCustomSampled;
  p.grid_x_ = std::make_shared<const std::vector<double>>(std::move(positions));
  p.grid_a_ = std::make_shared<const std::vector<double>>(std::move(amplitudes));
  p.grid_dx_ = dx;
  p.width_ = 0.0;
  p.delta_k_ = 1.0;  // placeholder until computed below
  p.delta_k_ = rms_bandwidth(p);
  return p;
}

Psf Psf::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open PSF file: " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("# psf v1", 0) != 0)
    throw std::invalid_argument("PSF file missing '# psf v1' header: " + path);
  std::vector<double> xs, as;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double x, a;
    if (!(row >> x >> a))
      throw std::invalid_argument("malformed PSF sample line: " + line);
    xs.push_back(x);
    as.push_back(a);
  }
  return from_samples(std::move(xs), std::move(as));
}

double Psf::operator()(double x) const {
  switch (kind_) {
    case PsfKind::kGaussian: {
      const double s2 = width_ * width_;
      return std::pow(2.0 * kPi * s2, -0.25) * std::exp(-x * x / (4.0 * s2));
    }
    case PsfKind::kSinc:
      return std::sqrt(width_ / kPi) * sinc_value(width_ * x);
    case PsfKind::kCustomSampled:
      return sample_interp(x);
  }
  return 0.0;
}

double Psf::derivative(double x) const {
  switch (kind_) {
    case PsfKind::kGaussian:
      return -x / (2.0 * width_ * width_) * (*this)(x);
    case PsfKind::kSinc:
      return std::sqrt(width_ / kPi) * width_ * sinc_derivative(width_ * x);
    case PsfKind::kCustomSampled:
      return sample_interp_derivative(x);
  }
  return 0.0;
}

double Psf::sample_interp(double x) const {
  const auto& xs = *grid_x_;
  const auto& as = *grid_a_;
  if (x <= xs.front() || x >= xs.back()) return 0.0;
  const double t = (x - xs.front()) / grid_dx_;
  const long i = static_cast<long>(t);
  const double f = t - static_cast<double>(i);
  // Catmull-Rom cubic through the four surrounding samples.
  const long n = static_cast<long>(as.size());
  const double p0 = as[std::max<long>(i - 1, 0)];
  const double p1 = as[i];
  const double p2 = as[std::min<long>(i + 1, n - 1)];
  const double p3 = as[std::min<long>(i + 2, n - 1)];
  const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
  const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
  const double c = -0.5 * p0 + 0.5 * p2;
  return ((a * f + b) * f + c) * f + p1;
}

double Psf::sample_interp_derivative(double x) const {
  const auto& xs = *grid_x_;
  const auto& as = *grid_a_;
  if (x <= xs.front() || x >= xs.back()) return 0.0;
  const double t = (x - xs.front()) / grid_dx_;
  const long i = static_cast<long>(t);
  const double f = t - static_cast<double>(i);
  const long n = static_cast<long>(as.size());
  const double p0 = as[std::max<long>(i - 1, 0)];
  const double p1 = as[i];
  const double p2 = as[std::min<long>(i + 1, n - 1)];
  const double p3 = as[std::min<long>(i + 2, n - 1)];
  const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
  const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
  const double c = -0.5 * p0 + 0.5 * p2;
  return ((3.0 * a * f + 2.0 * b) * f + c) / grid_dx_;
}

double Psf::overlap(double a, double b) const {
  const double u = a - b;
  switch (kind_) {
    case PsfKind::kGaussian:
      return std::exp(-u * u * delta_k_ * delta_k_ / 2.0);
    case PsfKind::kSinc:
      return sinc_value(width_ * u);
    case PsfKind::kCustomSampled: {
      const double half = domain_halfwidth(std::abs(a) + std::abs(b));
      return integrate([&](double x) { return (*this)(x - a) * (*this)(x - b); },
                       -half, half, 1e-10)
          .value;
    }
  }
  return 0.0;
}

double Psf::derivative_overlap(double a, double b) const {
  const double u = a - b;
  const double dk2 = delta_k_ * delta_k_;
  switch (kind_) {
    case PsfKind::kGaussian:
      return (dk2 - dk2 * dk2 * u * u) * std::exp(-dk2 * u * u / 2.0);
    case PsfKind::kSinc:
      return sinc_derivative_overlap(width_, u);
    case PsfKind::kCustomSampled: {
      const double half = domain_halfwidth(std::abs(a) + std::abs(b));
      return integrate(
                 [&](double x) {
                   return derivative(x - a) * derivative(x - b);
                 },
                 -half, half, 1e-10)
          .value;
    }
  }
  return 0.0;
}

double Psf::domain_halfwidth(double extra) const {
  switch (kind_) {
    case PsfKind::kGaussian:
      return 10.0 * width_ + extra;
    case PsfKind::kSinc:
      // Position-space tails fall off as 1/x; callers needing tight
      // tolerances should work in k-space instead.
      return 200.0 / width_ + extra;
    case PsfKind::kCustomSampled:
      return std::max(std::abs(grid_x_->front()), std::abs(grid_x_->back())) +
             extra;
  }
  return extra;
}

double rms_bandwidth(const Psf& psf) {
  if (psf.kind() == PsfKind::kSinc) {
    // Flat spectrum |psi_tilde|^2 = 1/(2W) on [-W, W]:
    // int k^2 |psi_tilde|^2 dk evaluated by quadrature in k-space.
    const double w = psf.width_param();
    const double second_moment =
        integrate_checked([w](double k) { return k * k / (2.0 * w); }, -w, w,
                          1e-12, 1e-12);
    return std::sqrt(second_moment);
  }
  const double half = psf.domain_halfwidth();
  const double energy = integrate_checked(
      [&](double x) {
        const double d = psf.derivative(x);
        return d * d;
      },
      -half, half, 1e-10, 1e-10, 20000);
  return std::sqrt(energy);
}

}  // namespace subray
