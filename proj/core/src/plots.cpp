#include <array>
#include <sstream>

#include "tnmf/bench.hpp"
#include "tnmf/error.hpp"
#include "tnmf/matrix_io.hpp"

namespace tnmf {

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr const char* kUnmatched = "#b0b0b0";

constexpr double kSize = 360.0;
constexpr double kMargin = 48.0;

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string file_safe(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

// Unit square: S on the x axis, R on the y axis.
double px(double s) { return kMargin + s * kSize; }
double py(double r) { return kMargin + (1.0 - r) * kSize; }

std::string render_svg(const EvalReport& report, int cls, const std::vector<std::size_t>& members) {
  std::ostringstream svg;
  const double full = kSize + 2.0 * kMargin;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full << "\" height=\"" << full << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << full << "\" height=\"" << full << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    svg << "<text x=\"" << px(v) << "\" y=\"" << kMargin + kSize + 16 << "\" font-size=\"10\" "
        << "text-anchor=\"middle\">" << v << "</text>\n";
    svg << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(v) + 3 << "\" font-size=\"10\" "
        << "text-anchor=\"end\">" << v << "</text>\n";
  }
  svg << "<text x=\"" << px(0.5) << "\" y=\"" << full - 8 << "\" font-size=\"12\" text-anchor=\"middle\">S</text>\n";
  svg << "<text x=\"12\" y=\"" << py(0.5) << "\" font-size=\"12\">R</text>\n";
  svg << "<text x=\"" << px(0.5) << "\" y=\"20\" font-size=\"13\" text-anchor=\"middle\">"
      << xml_escape(report.classes[static_cast<std::size_t>(cls)]) << "</text>\n";
  for (std::size_t m : members) {
    const int a = report.aligned_codes[m];
    const char* color = a < 0 ? kUnmatched : kPalette[static_cast<std::size_t>(a) % kPalette.size()];
    svg << "<circle cx=\"" << px(report.rs.s_scores[m]) << "\" cy=\"" << py(report.rs.r_scores[m])
        << "\" r=\"3\" fill=\"" << color << "\"><title>" << xml_escape(report.sample_ids[m]) << "</title></circle>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const EvalReport& report, const std::filesystem::path& out_dir,
                                              const std::string& prefix) {
  const std::size_t n = report.sample_ids.size();
  if (report.rs.r_scores.size() != n || report.rs.s_scores.size() != n || report.aligned_codes.size() != n ||
      report.true_codes.size() != n) {
    throw InvariantError("evaluation report has inconsistent lengths");
  }
  std::vector<std::filesystem::path> written;
  for (std::size_t l = 0; l < report.classes.size(); ++l) {
    std::vector<std::size_t> members;
    for (std::size_t m = 0; m < n; ++m) {
      if (report.true_codes[m] == static_cast<int>(l)) members.push_back(m);
    }
    const std::string stem = prefix + "_" + std::to_string(l) + "_" + file_safe(report.classes[l]);

    const auto csv_path = out_dir / (stem + ".csv");
    {
      auto csv = open_output(csv_path);
      csv << "sample_id,S,R,predicted\n";
      for (std::size_t m : members) {
        csv << report.sample_ids[m] << ',' << format_double(report.rs.s_scores[m]) << ','
            << format_double(report.rs.r_scores[m]) << ',' << report.aligned_name(m) << '\n';
      }
    }
    written.push_back(csv_path);

    const auto svg_path = out_dir / (stem + ".svg");
    open_output(svg_path) << render_svg(report, static_cast<int>(l), members);
    written.push_back(svg_path);
  }
  return written;
}

}  // namespace tnmf
