// Copyright 2026 The trajgraph Authors
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

#include "trajgraph/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace trajgraph
{

namespace
{

constexpr double kPxPerMeter = 20.0;
constexpr double kMargin = 20.0;
constexpr double kTitleHeight = 24.0;

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string & s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame
{
  double x0;
  double y0;
  double width_m;

  // Court length runs left to right, width bottom to top.
  std::string point(double l, double w) const
  {
    return fmt(x0 + l * kPxPerMeter) + "," + fmt(y0 + (width_m - w) * kPxPerMeter);
  }
};

std::string polyline(const Frame & f, const std::vector<std::pair<double, double>> & pts)
{
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) d += (i ? " L" : "M") + f.point(pts[i].first, pts[i].second);
  return d;
}

}  // namespace

std::string latent_color(std::size_t z, std::size_t count)
{
  const double hue = count == 0 ? 0.0 : 360.0 * static_cast<double>(z) / static_cast<double>(count);
  char buf[48];
  std::snprintf(buf, sizeof buf, "hsl(%.1f,75%%,45%%)", hue);
  return buf;
}

std::string render_samples_svg(std::span<const SvgPanel> panels, const CourtSpec & court, std::size_t joint_size)
{
  const double panel_w = court.length * kPxPerMeter + 2 * kMargin;
  const double panel_h = court.width * kPxPerMeter + 2 * kMargin + kTitleHeight;
  const double total_w = panel_w * static_cast<double>(std::max<std::size_t>(panels.size(), 1));

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(total_w) << "\" height=\"" << fmt(panel_h)
    << "\" viewBox=\"0 0 " << fmt(total_w) << " " << fmt(panel_h) << "\">\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const SvgPanel & panel = panels[p];
    const Frame f{static_cast<double>(p) * panel_w + kMargin, kMargin + kTitleHeight, court.width};
    o << "<g class=\"panel\" id=\"panel-" << p << "\">\n";
    o << "<text x=\"" << fmt(f.x0) << "\" y=\"" << fmt(kMargin + 12.0) << "\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(panel.title) << "</text>\n";
    o << "<rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\"" << fmt(court.length * kPxPerMeter)
      << "\" height=\"" << fmt(court.width * kPxPerMeter) << "\" fill=\"#f4e9d8\" stroke=\"#333\"/>\n";
    o << "<line x1=\"" << fmt(f.x0 + 0.5 * court.length * kPxPerMeter) << "\" y1=\"" << fmt(f.y0) << "\" x2=\""
      << fmt(f.x0 + 0.5 * court.length * kPxPerMeter) << "\" y2=\"" << fmt(f.y0 + court.width * kPxPerMeter)
      << "\" stroke=\"#333\"/>\n";

    for (const auto & node : panel.example.nodes) {
      std::vector<std::pair<double, double>> hist;
      for (const auto & h : node.history) hist.emplace_back(h[0], h[1]);
      hist.emplace_back(node.current.l, node.current.w);
      const bool agent = node.id == panel.example.agent_id;
      o << "<path class=\"history\" data-node=\"" << node.id << "\" d=\"" << polyline(f, hist)
        << "\" fill=\"none\" stroke=\"" << (agent ? "#000" : "#777") << "\" stroke-width=\"2\"/>\n";
      o << "<circle data-node=\"" << node.id << "\" cx=\"" << fmt(f.x0 + node.current.l * kPxPerMeter) << "\" cy=\""
        << fmt(f.y0 + (court.width - node.current.w) * kPxPerMeter) << "\" r=\"4\" fill=\"" << (agent ? "#000" : "#555")
        << "\"/>\n";
    }
    std::vector<std::pair<double, double>> agent_path;
    const auto & agent = panel.example.node(panel.example.agent_id);
    agent_path.emplace_back(agent.current.l, agent.current.w);
    for (const auto & a : panel.example.agent_future) agent_path.emplace_back(a[0], a[1]);
    o << "<path class=\"agent-future\" d=\"" << polyline(f, agent_path)
      << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";

    for (const auto & ns : panel.samples) {
      const auto & start = panel.example.node(ns.node).current;
      for (std::size_t s = 0; s < ns.samples.size(); ++s) {
        const auto & sample = ns.samples[s];
        std::vector<std::pair<double, double>> pts{{start.l, start.w}};
        for (const auto & x : sample.states) pts.emplace_back(x.l, x.w);
        o << "<path class=\"sample\" data-node=\"" << ns.node << "\" data-z=\"" << sample.joint_z << "\" d=\""
          << polyline(f, pts) << "\" fill=\"none\" stroke=\"" << latent_color(sample.joint_z, joint_size)
          << "\" stroke-opacity=\"0.35\" stroke-width=\"1\"/>\n";
      }
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace trajgraph
