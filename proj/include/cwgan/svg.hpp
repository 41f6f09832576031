#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cwgan/data.hpp"
#include "cwgan/train.hpp"

namespace cwgan {

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace detail

// Static SVG line plot of both loss curves against the epoch axis.
inline std::string loss_plot_svg(const TrainingLog& log) {
  if (log.records.empty()) throw StateError("loss_plot_svg: empty log");

  constexpr double width = 720, height = 440;
  constexpr double ml = 64, mr = 16, mt = 28, mb = 44;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_lo = log.records.front().epoch, x_hi = log.records.back().epoch;
  if (x_hi == x_lo) {
    x_lo -= 1;
    x_hi += 1;
  }
  double y_lo = log.records.front().d_loss, y_hi = y_lo;
  for (const LogRecord& r : log.records) {
    y_lo = std::min({y_lo, r.d_loss, r.g_loss});
    y_hi = std::max({y_hi, r.d_loss, r.g_loss});
  }
  const double pad = (y_hi - y_lo) > 0 ? 0.05 * (y_hi - y_lo) : 1.0;
  y_lo -= pad;
  y_hi += pad;

  auto px = [&](double epoch) { return ml + (epoch - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return mt + (y_hi - v) / (y_hi - y_lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width, "%.0f") +
       "\" height=\"" + detail::fmt(height, "%.0f") + "\" viewBox=\"0 0 " +
       detail::fmt(width, "%.0f") + " " + detail::fmt(height, "%.0f") + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + detail::fmt(width / 2) + "\" y=\"18\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"14\">training losses</text>\n";

  // axes
  s += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(mt) + "\" x2=\"" +
       detail::fmt(ml) + "\" y2=\"" + detail::fmt(mt + ph) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(mt + ph) + "\" x2=\"" +
       detail::fmt(ml + pw) + "\" y2=\"" + detail::fmt(mt + ph) + "\" stroke=\"black\"/>\n";
  auto tick_text = [&](double x, double y, const std::string& anchor, double v) {
    s += "<text x=\"" + detail::fmt(x) + "\" y=\"" + detail::fmt(y) + "\" text-anchor=\"" +
         anchor + "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt(v, "%.4g") +
         "</text>\n";
  };
  tick_text(ml - 6, py(y_lo) + 4, "end", y_lo);
  tick_text(ml - 6, py(y_hi) + 4, "end", y_hi);
  if (y_lo < 0.0 && 0.0 < y_hi) tick_text(ml - 6, py(0.0) + 4, "end", 0.0);
  tick_text(px(x_lo), mt + ph + 16, "middle", x_lo);
  tick_text(px(x_hi), mt + ph + 16, "middle", x_hi);
  s += "<text x=\"" + detail::fmt(ml + pw / 2) + "\" y=\"" + detail::fmt(height - 10) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">epoch</text>\n";

  auto polyline = [&](const char* color, bool d_series) {
    s += "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"1.5\" points=\"";
    for (const LogRecord& r : log.records) {
      s += detail::fmt(px(r.epoch)) + "," + detail::fmt(py(d_series ? r.d_loss : r.g_loss)) + " ";
    }
    s += "\"/>\n";
    if (log.records.size() <= 16) {
      for (const LogRecord& r : log.records)
        s += "<circle cx=\"" + detail::fmt(px(r.epoch)) + "\" cy=\"" +
             detail::fmt(py(d_series ? r.d_loss : r.g_loss)) + "\" r=\"2.5\" fill=\"" + color +
             "\"/>\n";
    }
  };
  polyline("#1f77b4", true);
  polyline("#ff7f0e", false);

  // legend
  s += "<rect x=\"" + detail::fmt(ml + pw - 130) + "\" y=\"" + detail::fmt(mt + 8) +
       "\" width=\"118\" height=\"40\" fill=\"white\" stroke=\"#999\"/>\n";
  s += "<line x1=\"" + detail::fmt(ml + pw - 122) + "\" y1=\"" + detail::fmt(mt + 22) +
       "\" x2=\"" + detail::fmt(ml + pw - 98) + "\" y2=\"" + detail::fmt(mt + 22) +
       "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  s += "<text x=\"" + detail::fmt(ml + pw - 92) + "\" y=\"" + detail::fmt(mt + 26) +
       "\" font-family=\"sans-serif\" font-size=\"12\">critic loss</text>\n";
  s += "<line x1=\"" + detail::fmt(ml + pw - 122) + "\" y1=\"" + detail::fmt(mt + 38) +
       "\" x2=\"" + detail::fmt(ml + pw - 98) + "\" y2=\"" + detail::fmt(mt + 38) +
       "\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
  s += "<text x=\"" + detail::fmt(ml + pw - 92) + "\" y=\"" + detail::fmt(mt + 42) +
       "\" font-family=\"sans-serif\" font-size=\"12\">generator loss</text>\n";
  s += "</svg>\n";
  return s;
}

inline void write_loss_plot(const TrainingLog& log, const std::filesystem::path& path) {
  atomic_write_file(path, loss_plot_svg(log));
}

}  // namespace cwgan
