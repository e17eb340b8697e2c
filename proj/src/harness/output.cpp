#include "csa/harness/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "csa/io.hpp"

namespace csa::harness {

namespace {

std::string cell(const std::optional<double> &v) { return v ? format_double(*v) : std::string(); }

std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

std::string escape_xml(const std::string &s) {
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

constexpr const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

} // namespace

void CurveTable::add_row(std::int64_t k_, std::optional<double> mean, std::optional<double> se,
                         std::optional<double> b) {
  k.push_back(k_);
  empirical_mean.push_back(mean);
  empirical_stderr.push_back(se);
  bound.push_back(b);
}

void CurveTable::validate() const {
  if (empirical_mean.size() != k.size() || empirical_stderr.size() != k.size() || bound.size() != k.size())
    throw std::logic_error("curve table columns differ in length");
  for (std::size_t i = 1; i < k.size(); ++i)
    if (k[i] <= k[i - 1])
      throw std::logic_error("curve table rows are not sorted by k");
  for (const auto &s : empirical_stderr)
    if (s && !(*s >= 0.0))
      throw std::logic_error("negative standard error in curve table");
}

std::string to_csv(const CurveTable &t) {
  t.validate();
  std::string out = kCsvHeader;
  out += '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += std::to_string(t.k[i]);
    out += ',';
    out += cell(t.empirical_mean[i]);
    out += ',';
    out += cell(t.empirical_stderr[i]);
    out += ',';
    out += cell(t.bound[i]);
    out += '\n';
  }
  return out;
}

std::string render_svg(const std::string &title, const std::vector<CurveTable> &tables) {
  const double W = 720, H = 460, left = 80, right = 180, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double xmax = 1.0, ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
  auto see_y = [&](double v) {
    if (v > 0.0 && std::isfinite(v)) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  };
  for (const auto &t : tables)
    for (std::size_t i = 0; i < t.size(); ++i) {
      xmax = std::max(xmax, static_cast<double>(t.k[i]) + 1.0);
      if (t.empirical_mean[i]) {
        const double se = t.empirical_stderr[i].value_or(0.0);
        see_y(*t.empirical_mean[i] + 2.0 * se);
        see_y(*t.empirical_mean[i] - 2.0 * se);
        see_y(*t.empirical_mean[i]);
      }
      if (t.bound[i])
        see_y(*t.bound[i]);
    }
  if (!std::isfinite(ymin)) {
    ymin = 1e-3;
    ymax = 1.0;
  }
  double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
  if (ly1 <= ly0)
    ly1 = ly0 + 1.0;
  const double lx1 = std::max(1.0, std::ceil(std::log10(xmax)));
  auto px = [&](double k) { return left + pw * std::log10(k + 1.0) / lx1; };
  auto py = [&](double y) {
    const double ly = std::clamp(std::log10(std::max(y, 1e-300)), ly0, ly1);
    return top + ph * (1.0 - (ly - ly0) / (ly1 - ly0));
  };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" << escape_xml(title)
    << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = ly0; e <= ly1; e += 1.0) {
    const double y = py(std::pow(10.0, e));
    s << "<line x1=\"" << left << "\" y1=\"" << fixed(y) << "\" x2=\"" << left + pw << "\" y2=\"" << fixed(y)
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << fixed(y + 4) << "\" font-family=\"sans-serif\" font-size=\"11\" "
      << "text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
  }
  for (double e = 0; e <= lx1; e += 1.0) {
    const double x = px(std::pow(10.0, e) - 1.0);
    s << "<line x1=\"" << fixed(x) << "\" y1=\"" << top << "\" x2=\"" << fixed(x) << "\" y2=\"" << top + ph
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << fixed(x) << "\" y=\"" << top + ph + 16 << "\" font-family=\"sans-serif\" font-size=\"11\" "
      << "text-anchor=\"middle\">1e" << static_cast<int>(e) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 16
    << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">k + 1</text>\n";

  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const auto &t = tables[ti];
    const char *colour = kPalette[ti % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string upper, lower, line, bound;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double x = px(static_cast<double>(t.k[i]));
      if (t.empirical_mean[i]) {
        const double m = *t.empirical_mean[i];
        const double se = t.empirical_stderr[i].value_or(0.0);
        line += (line.empty() ? "M" : " L") + fixed(x) + ',' + fixed(py(m));
        upper += (upper.empty() ? "" : " ") + fixed(x) + ',' + fixed(py(m + 2.0 * se));
        lower = fixed(x) + ',' + fixed(py(m - 2.0 * se)) + (lower.empty() ? "" : " ") + lower;
      }
      if (t.bound[i])
        bound += (bound.empty() ? "M" : " L") + fixed(x) + ',' + fixed(py(*t.bound[i]));
    }
    if (!upper.empty())
      s << "<polygon points=\"" << upper << ' ' << lower << "\" fill=\"" << colour
        << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    if (!line.empty())
      s << "<path d=\"" << line << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"/>\n";
    if (!bound.empty())
      s << "<path d=\"" << bound << "\" fill=\"none\" stroke=\"" << colour
        << "\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    const double ly = top + 14.0 + 36.0 * static_cast<double>(ti);
    s << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << escape_xml(t.label.empty() ? "empirical" : t.label) << "</text>\n";
    s << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 18
      << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\">band: +-2 SE; dashed: bound</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::filesystem::path resolve_output_dir(const std::string &explicit_dir) {
  if (!explicit_dir.empty())
    return explicit_dir;
  if (const char *env = std::getenv("CONTRACT_SA_OUTPUT_DIR"); env && *env)
    return env;
  return std::filesystem::current_path();
}

} // namespace csa::harness
