#include "conset/svg.hpp"

#include "conset/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace conset {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

std::ostringstream open_svg(int w, int h) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os;
}

}  // namespace

std::string control_sets_svg(const CellGrid& grid, const std::vector<ControlSetResult>& sets) {
  if (!grid.one_dimensional()) fail(ErrorKind::InvalidInput, "control_sets_svg needs a 1-D grid");
  const double cx = 200.0, cy = 200.0, R = 150.0;
  auto os = open_svg(400, 400);
  os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << R
     << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"40\" y1=\"200\" x2=\"360\" y2=\"200\" stroke=\"#dddddd\"/>\n";
  os << "<line x1=\"200\" y1=\"40\" x2=\"200\" y2=\"360\" stroke=\"#dddddd\"/>\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& cs = sets[s];
    os << "<g stroke=\"" << color(s) << "\" stroke-width=\"6\" fill=\"none\""
       << (cs.invariant ? "" : " stroke-dasharray=\"6,4\"") << ">\n";
    for (const auto& [first, last] : cell_ranges(cs, grid)) {
      const int count = last >= first ? last - first + 1 : last + grid.size() - first + 1;
      const double a0 = grid.cell_start(first);
      const double a1 = a0 + count * grid.cell_width();
      os << "<polyline points=\"";
      const int pieces = std::max(2, count + 1);
      for (int k = 0; k < pieces; ++k) {
        const double a = a0 + (a1 - a0) * k / (pieces - 1);
        os << cx + R * std::cos(a) << ',' << cy - R * std::sin(a) << ' ';
      }
      os << "\"/>\n";
    }
    os << "</g>\n";
    const auto& mid = cs.cells[cs.cells.size() / 2];
    const double a = grid.cell_start(mid);
    os << "<text x=\"" << cx + (R + 20) * std::cos(a) << "\" y=\"" << cy - (R + 20) * std::sin(a)
       << "\" font-size=\"12\" fill=\"" << color(s) << "\">" << cs.id << (cs.invariant ? " inv" : "") << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string box_sets_svg(const CellGrid& grid, const std::vector<ControlSetResult>& sets) {
  if (grid.one_dimensional()) fail(ErrorKind::InvalidInput, "box_sets_svg needs a box grid");
  const double W = 400.0;
  const int nx = grid.per_axis()[0];
  const int ny = grid.per_axis()[1];
  const double cw = W / nx, ch = W / ny;
  auto os = open_svg(static_cast<int>(W), static_cast<int>(W));
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << W << "\" fill=\"none\" stroke=\"#888888\"/>\n";
  for (std::size_t s = 0; s < sets.size(); ++s) {
    os << "<g fill=\"" << color(s) << "\" fill-opacity=\"" << (sets[s].invariant ? 0.8 : 0.4) << "\">\n";
    for (int c : sets[s].cells) {
      const int ix = c % nx;
      const int iy = c / nx;
      os << "<rect x=\"" << ix * cw << "\" y=\"" << W - (iy + 1) * ch << "\" width=\"" << cw << "\" height=\"" << ch
         << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string branches_svg(const BranchTrace& trace, int dim) {
  struct P {
    double x, y;
  };
  std::vector<std::vector<P>> curves;
  for (const auto& br : trace.branches) {
    std::vector<P> pts;
    for (std::size_t i = 0; i < br.points.size(); ++i) {
      const auto& p = br.points[i];
      if (p.kind != EquilibriumKind::Unique) continue;
      if (dim == 2) {
        pts.push_back({p.x[0], p.x[1]});
      } else {
        const double s = trace.scalar ? p.u[0] : static_cast<double>(i);
        pts.push_back({s, p.x.norm()});
      }
    }
    curves.push_back(std::move(pts));
  }
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& c : curves) {
    for (const auto& p : c) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (!std::isfinite(xmin)) xmin = ymin = -1.0, xmax = ymax = 1.0;
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double clip = 10.0;
  xmin = std::max(xmin, -clip);
  xmax = std::min(xmax, clip);
  ymin = std::max(ymin, -clip);
  ymax = std::min(ymax, clip);
  if (!(xmax > xmin)) xmax = xmin + span;
  if (!(ymax > ymin)) ymax = ymin + span;
  const double W = 400.0, M = 30.0;
  auto sx = [&](double x) { return M + (x - xmin) / (xmax - xmin) * (W - 2 * M); };
  auto sy = [&](double y) { return W - M - (y - ymin) / (ymax - ymin) * (W - 2 * M); };
  auto os = open_svg(static_cast<int>(W), static_cast<int>(W));
  os << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << W - 2 * M
     << "\" fill=\"none\" stroke=\"#888888\"/>\n";
  for (std::size_t b = 0; b < curves.size(); ++b) {
    os << "<polyline fill=\"none\" stroke=\"" << color(b) << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : curves[b]) {
      if (p.x < xmin || p.x > xmax || p.y < ymin || p.y > ymax) continue;
      os << sx(p.x) << ',' << sy(p.y) << ' ';
    }
    os << "\"/>\n";
  }
  os << "<text x=\"" << M << "\" y=\"20\" font-size=\"12\">" << (dim == 2 ? "x_u in the plane" : "|x_u| against u")
     << ", " << trace.branches.size() << " branches</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  out << content;
}

}  // namespace conset
