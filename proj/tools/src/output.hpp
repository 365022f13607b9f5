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


#ifndef KSMOOTH_TOOLS_OUTPUT_HPP_
#define KSMOOTH_TOOLS_OUTPUT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ksmooth::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool points = false;  // markers instead of a polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  // Vertical extent; computed from the data when lo >= hi.
  double y_lo = 0.0;
  double y_hi = 0.0;
};

// Self-contained SVG line chart.
std::string render_svg(const Plot& plot);

// Writes `content` to dir/name, creating dir. Throws IOError.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content);

// Sidecar fields shared by every command: seed, scale, generator name,
// version and a UTC timestamp.
nlohmann::json base_metadata(std::uint64_t seed, double scale);

}  // namespace ksmooth::cli

#endif  // KSMOOTH_TOOLS_OUTPUT_HPP_
