#include "subray/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace subray {

TwoPointScene::TwoPointScene(double centroid_, double separation_,
                             double brightness_split_)
    : centroid(centroid_),
      separation(separation_),
      brightness_split(brightness_split_) {
  if (separation < 0.0)
    throw std::invalid_argument("separation must be >= 0");
  if (brightness_split < 0.0 || brightness_split > 1.0)
    throw std::invalid_argument("brightness split must lie in [0, 1]");
}

CoherentPairScene::CoherentPairScene(double separation_, double mean_photons_,
                                     std::complex<double> gamma_)
    : separation(separation_), mean_photons(mean_photons_), gamma(gamma_) {
  if (separation < 0.0)
    throw std::invalid_argument("separation must be >= 0");
  if (!(mean_photons > 0.0))
    throw std::invalid_argument("mean photon number must be > 0");
  if (std::abs(gamma) > 1.0 + 1e-12)
    throw std::invalid_argument("|gamma| must be <= 1");
}

Constellation Constellation::points1d(const std::vector<double>& positions,
                                      const std::vector<double>& brightness) {
  if (positions.size() != brightness.size())
    throw std::invalid_argument("positions/brightness size mismatch");
  Constellation c;
  c.dimensionality = 1;
  for (size_t i = 0; i < positions.size(); ++i)
    c.emitters.push_back({positions[i], 0.0, brightness[i]});
  c.validate();
  return c;
}

void Constellation::validate() const {
  if (emitters.empty()) throw std::invalid_argument("empty constellation");
  double sum = 0.0;
  for (const auto& e : emitters) {
    if (!(e.brightness > 0.0))
      throw std::invalid_argument("emitter brightness must be positive");
    sum += e.brightness;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("emitter brightnesses must sum to 1");
}

void IntensityGrid::validate() const {
  if (width <= 0 || height <= 0 ||
      values.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("inconsistent grid dimensions");
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0) throw std::invalid_argument("grid intensities must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("grid intensities must sum to 1");
}

void IntensityGrid::normalize() {
  double sum = 0.0;
  for (double v : values) sum += v;
  if (!(sum > 0.0)) throw std::invalid_argument("grid has zero total mass");
  for (auto& v : values) v /= sum;
}

IntensityGrid IntensityGrid::load_pgm(const std::string& path,
                                      double pixel_pitch, double center_x,
                                      double center_y) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open graymap: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5")
    throw std::invalid_argument("unsupported graymap magic: " + magic);
  auto next_token = [&in]() {
    std::string tok;
    for (;;) {
      if (!(in >> tok)) throw std::invalid_argument("truncated graymap header");
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::invalid_argument("graymap must be 8-bit with positive size");

  IntensityGrid g;
  g.width = w;
  g.height = h;
  g.pixel_pitch = pixel_pitch;
  g.x0 = center_x - 0.5 * (w - 1) * pixel_pitch;
  g.y0 = center_y - 0.5 * (h - 1) * pixel_pitch;
  g.values.assign(static_cast<size_t>(w) * h, 0.0);

  if (magic == "P2") {
    for (int row = 0; row < h; ++row)
      for (int i = 0; i < w; ++i) {
        const int v = std::stoi(next_token());
        g.at(i, h - 1 - row) = static_cast<double>(v);
      }
  } else {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (!in) throw std::invalid_argument("truncated graymap payload");
    for (int row = 0; row < h; ++row)
      for (int i = 0; i < w; ++i)
        g.at(i, h - 1 - row) = static_cast<double>(raw[row * w + i]);
  }
  g.normalize();
  return g;
}

void IntensityGrid::save_pgm(const std::string& path) const {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write graymap: " + path);
  out << "P5\n" << width << " " << height << "\n255\n";
  for (int row = 0; row < height; ++row)
    for (int i = 0; i < width; ++i) {
      const double v = at(i, height - 1 - row) / peak;
      out.put(static_cast<char>(std::lround(255.0 * v)));
    }
}

std::vector<WeightedDisplacement> mixture_components(const TwoPointScene& s) {
  return {{1.0 - s.brightness_split, s.centroid - 0.5 * s.separation},
          {s.brightness_split, s.centroid + 0.5 * s.separation}};
}

std::vector<WeightedDisplacement> mixture_components(const Constellation& c) {
  c.validate();
  std::vector<WeightedDisplacement> out;
  out.reserve(c.emitters.size());
  for (const auto& e : c.emitters) out.push_back({e.brightness, e.x});
  return out;
}

std::pair<double, double> second_moments(const IntensityGrid& grid) {
  grid.validate();
  double cx = 0.0, cy = 0.0;
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < grid.width; ++i) {
      cx += grid.at(i, j) * grid.x_of(i);
      cy += grid.at(i, j) * grid.y_of(j);
    }
  double mx = 0.0, my = 0.0;
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < grid.width; ++i) {
      const double dx = grid.x_of(i) - cx;
      const double dy = grid.y_of(j) - cy;
      mx += grid.at(i, j) * dx * dx;
      my += grid.at(i, j) * dy * dy;
    }
  return {mx, my};
}

std::pair<double, double> second_moments_about_origin(const IntensityGrid& g) {
  g.validate();
  double mx = 0.0, my = 0.0;
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      mx += g.at(i, j) * g.x_of(i) * g.x_of(i);
      my += g.at(i, j) * g.y_of(j) * g.y_of(j);
    }
  return {mx, my};
}

namespace {

std::map<std::string, std::string> read_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string key;
    row >> key;
    std::string rest;
    std::getline(row, rest);
    const auto start = rest.find_first_not_of(" \t");
    kv[key] = (start == std::string::npos) ? "" : rest.substr(start);
  }
  return kv;
}

double require_num(const std::map<std::string, std::string>& kv,
                   const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument("scene file missing key: " + key);
  return std::stod(it->second);
}

}  // namespace

SceneVariant load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scene file: " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("scene v1", 0) != 0)
    throw std::invalid_argument("scene file missing 'scene v1' header");
  auto kv = read_kv(in);
  const auto type = kv.find("type");
  if (type == kv.end())
    throw std::invalid_argument("scene file missing 'type'");
  if (type->second == "two-point") {
    double split = kv.count("brightness_split")
                       ? require_num(kv, "brightness_split")
                       : 0.5;
    return TwoPointScene(require_num(kv, "centroid"),
                         require_num(kv, "separation"), split);
  }
  if (type->second == "coherent-pair") {
    const double re = kv.count("gamma_re") ? require_num(kv, "gamma_re") : 0.0;
    const double im = kv.count("gamma_im") ? require_num(kv, "gamma_im") : 0.0;
    return CoherentPairScene(require_num(kv, "separation"),
                             require_num(kv, "mean_photons"), {re, im});
  }
  if (type->second == "constellation") {
    Constellation c;
    c.dimensionality =
        kv.count("dimensionality")
            ? static_cast<int>(require_num(kv, "dimensionality"))
            : 1;
    // emitter lines: "emitter <x> [<y>] <brightness>"; re-scan the file.
    std::ifstream again(path);
    std::string line;
    std::getline(again, line);
    while (std::getline(again, line)) {
      if (line.rfind("emitter", 0) != 0) continue;
      std::istringstream row(line);
      std::string tag;
      row >> tag;
      std::vector<double> nums;
      double v;
      while (row >> v) nums.push_back(v);
      Emitter e;
      if (c.dimensionality == 2 && nums.size() == 3) {
        e = {nums[0], nums[1], nums[2]};
      } else if (nums.size() == 2) {
        e = {nums[0], 0.0, nums[1]};
      } else {
        throw std::invalid_argument("malformed emitter line: " + line);
      }
      c.emitters.push_back(e);
    }
    c.validate();
    return c;
  }
  throw std::invalid_argument("unknown scene type: " + type->second);
}

void save_scene(const SceneVariant& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write scene file: " + path);
  out << "scene v1\n";
  out.precision(17);
  if (const auto* s = std::get_if<TwoPointScene>(&scene)) {
    out << "type two-point\n"
        << "centroid " << s->centroid << "\n"
        << "separation " << s->separation << "\n"
        << "brightness_split " << s->brightness_split << "\n";
  } else if (const auto* s = std::get_if<CoherentPairScene>(&scene)) {
    out << "type coherent-pair\n"
        << "separation " << s->separation << "\n"
        << "mean_photons " << s->mean_photons << "\n"
        << "gamma_re " << s->gamma.real() << "\n"
        << "gamma_im " << s->gamma.imag() << "\n";
  } else if (const auto* s = std::get_if<Constellation>(&scene)) {
    out << "type constellation\n"
        << "dimensionality " << s->dimensionality << "\n";
    for (const auto& e : s->emitters) {
      if (s->dimensionality == 2)
        out << "emitter " << e.x << " " << e.y << " " << e.brightness << "\n";
      else
        out << "emitter " << e.x << " " << e.brightness << "\n";
    }
  }
}

}  // namespace subray
