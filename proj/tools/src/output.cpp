// Copyright 2026 The ksmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "output.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "ksmooth/rng.hpp"
#include "ksmooth/version.hpp"

namespace ksmooth::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Multiples of 1, 2 or 5 times a power of ten inside [lo, hi], about five of them.
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double f : {1.0, 2.0, 5.0}) {
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return out;
}

}  // namespace

std::string render_svg(const Plot& plot) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const Series& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  if (plot.y_lo < plot.y_hi) {
    ylo = plot.y_lo;
    yhi = plot.y_hi;
  }
  if (!(xlo < xhi)) {
    xlo = std::isfinite(xlo) ? xlo - 1.0 : 0.0;
    xhi = xlo + 2.0;
  }
  if (!(ylo < yhi)) {
    ylo = std::isfinite(ylo) ? ylo - 1.0 : 0.0;
    yhi = ylo + 2.0;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
  auto sy = [&](double y) {
    y = std::clamp(y, ylo, yhi);
    return kTop + (yhi - y) / (yhi - ylo) * ph;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double fx : nice_ticks(xlo, xhi)) {
    o << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
  }
  for (double fy : nice_ticks(ylo, yhi)) {
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(fy) + 4)
      << "\" text-anchor=\"end\">" << tick(fy) << "</text>\n";
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(sy(fy))
      << "\" y2=\"" << num(sy(fy)) << "\" stroke=\"#e0e0e0\"/>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
    << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const Series& se = plot.series[s];
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    if (se.points) {
      o << "<g fill=\"none\" stroke=\"" << color << "\">\n";
      for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
        if (!std::isfinite(se.y[i])) continue;
        o << "<circle cx=\"" << num(sx(se.x[i])) << "\" cy=\"" << num(sy(se.y[i]))
          << "\" r=\"2.5\"/>\n";
      }
      o << "</g>\n";
    } else {
      o << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
        if (!std::isfinite(se.y[i])) continue;
        o << num(sx(se.x[i])) << ',' << num(sy(se.y[i])) << ' ';
      }
      o << "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(s);
    const double lx = kLeft + pw + 14;
    if (se.points) {
      o << "<circle cx=\"" << num(lx + 10) << "\" cy=\"" << num(ly - 4)
        << "\" r=\"2.5\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    } else {
      o << "<line x1=\"" << num(lx) << "\" x2=\"" << num(lx + 20) << "\" y1=\"" << num(ly - 4)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    o << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\">" << escape(se.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IOError("cannot create directory '" + dir.string() + "': " + ec.message());
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IOError("failed writing '" + path.string() + "'");
  return path;
}

nlohmann::json base_metadata(std::uint64_t seed, double scale) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"seed", seed},
          {"scale", scale},
          {"rng", kRngName},
          {"version", kVersion},
          {"timestamp", stamp}};
}

}  // namespace ksmooth::cli
