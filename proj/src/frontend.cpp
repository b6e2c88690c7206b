#include "relcheck/frontend.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace relcheck {

int parse_plane(const std::string& name) {
  if (name == "t-x1") return 1;
  if (name == "t-x2") return 2;
  if (name == "t-x3") return 3;
  throw std::invalid_argument("unknown plane '" + name + "' (expected t-x1, t-x2 or t-x3)");
}

namespace {

constexpr long kCanvas = 400;
constexpr long kMargin = 20;

struct P2 {
  Scalar x, t;
};

struct Frame {
  Scalar xlo, xhi, tlo, thi;

  Scalar px(const Scalar& x) const {
    return Scalar(kMargin) + (x - xlo) / (xhi - xlo) * Scalar(kCanvas - 2 * kMargin);
  }
  Scalar py(const Scalar& t) const {
    return Scalar(kMargin) + (thi - t) / (thi - tlo) * Scalar(kCanvas - 2 * kMargin);
  }
};

std::string fmt(const Scalar& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", s.to_double());
  std::string out = buf;
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

P2 project(const Vec4& v, int axis) { return {v(axis), v(0)}; }

Frame frame_for(const std::vector<P2>& pts) {
  Frame f{Scalar(-1), Scalar(1), Scalar(-1), Scalar(1)};
  for (const P2& p : pts) {
    f.xlo = std::min(f.xlo, p.x - Scalar(1));
    f.xhi = std::max(f.xhi, p.x + Scalar(1));
    f.tlo = std::min(f.tlo, p.t - Scalar(1));
    f.thi = std::max(f.thi, p.t + Scalar(1));
  }
  const Scalar w = f.xhi - f.xlo, h = f.thi - f.tlo;
  const Scalar half(Scalar::rational(1, 2));
  if (w < h) {
    f.xlo -= (h - w) * half;
    f.xhi += (h - w) * half;
  } else if (h < w) {
    f.tlo -= (w - h) * half;
    f.thi += (w - h) * half;
  }
  return f;
}

// Parameter range of base + s*dir inside the frame; dir is not zero.
std::pair<Scalar, Scalar> clip(const Frame& f, const P2& b, const P2& d) {
  bool set = false;
  Scalar lo, hi;
  auto narrow = [&](const Scalar& bc, const Scalar& dc, const Scalar& l, const Scalar& h) {
    if (dc.is_zero()) return;
    Scalar a = (l - bc) / dc, c = (h - bc) / dc;
    if (c < a) std::swap(a, c);
    if (!set) {
      lo = a;
      hi = c;
      set = true;
    } else {
      lo = std::max(lo, a);
      hi = std::min(hi, c);
    }
  };
  narrow(b.x, d.x, f.xlo, f.xhi);
  narrow(b.t, d.t, f.tlo, f.thi);
  return {lo, hi};
}

}  // namespace

std::string render_diagram(const Scenario& s, int axis) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("plane axis must be 1, 2 or 3");
  std::vector<P2> pts;
  for (const auto& [name, o] : s.observers) pts.push_back(project(o.line.base, axis));
  for (const auto& [name, e] : s.signals) {
    pts.push_back(project(e.beg, axis));
    pts.push_back(project(e.end, axis));
  }
  const Frame f = frame_for(pts);
  const std::string xname = "x" + std::to_string(axis);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
      << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas << "\">\n";
  out << "<rect width=\"" << kCanvas << "\" height=\"" << kCanvas << "\" fill=\"white\"/>\n";
  out << "<line class=\"axis\" x1=\"" << fmt(f.px(f.xlo)) << "\" y1=\"" << fmt(f.py(Scalar(0)))
      << "\" x2=\"" << fmt(f.px(f.xhi)) << "\" y2=\"" << fmt(f.py(Scalar(0)))
      << "\" stroke=\"gray\"/>\n";
  out << "<line class=\"axis\" x1=\"" << fmt(f.px(Scalar(0))) << "\" y1=\"" << fmt(f.py(f.tlo))
      << "\" x2=\"" << fmt(f.px(Scalar(0))) << "\" y2=\"" << fmt(f.py(f.thi))
      << "\" stroke=\"gray\"/>\n";
  out << "<text class=\"axis-label\" x=\"" << fmt(f.px(f.xhi) - Scalar(12)) << "\" y=\""
      << fmt(f.py(Scalar(0)) - Scalar(4)) << "\">" << xname << "</text>\n";
  out << "<text class=\"axis-label\" x=\"" << fmt(f.px(Scalar(0)) + Scalar(4)) << "\" y=\""
      << fmt(f.py(f.thi) + Scalar(12)) << "\">t</text>\n";

  for (const auto& [name, o] : s.observers) {
    const P2 b = project(o.line.base, axis), d = project(o.line.dir, axis);
    if (d.x.is_zero() && d.t.is_zero()) {
      out << "<circle class=\"observer\" cx=\"" << fmt(f.px(b.x)) << "\" cy=\"" << fmt(f.py(b.t))
          << "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
      out << "<text class=\"label\" x=\"" << fmt(f.px(b.x) + Scalar(6)) << "\" y=\""
          << fmt(f.py(b.t) - Scalar(6)) << "\">" << escape(name) << "</text>\n";
      continue;
    }
    auto [lo, hi] = clip(f, b, d);
    const P2 p{b.x + d.x * lo, b.t + d.t * lo}, q{b.x + d.x * hi, b.t + d.t * hi};
    out << "<line class=\"observer\" x1=\"" << fmt(f.px(p.x)) << "\" y1=\"" << fmt(f.py(p.t))
        << "\" x2=\"" << fmt(f.px(q.x)) << "\" y2=\"" << fmt(f.py(q.t))
        << "\" stroke=\"black\"/>\n";
    const P2& top = q.t < p.t ? p : q;
    out << "<text class=\"label\" x=\"" << fmt(f.px(top.x) + Scalar(4)) << "\" y=\""
        << fmt(f.py(top.t) + Scalar(12)) << "\">" << escape(name) << "</text>\n";
  }

  for (const auto& [name, e] : s.signals) {
    const P2 b = project(e.beg, axis), c = project(e.end, axis);
    if (is_event(e)) {
      out << "<circle class=\"event\" cx=\"" << fmt(f.px(b.x)) << "\" cy=\"" << fmt(f.py(b.t))
          << "\" r=\"3\" fill=\"black\"/>\n";
      out << "<text class=\"label\" x=\"" << fmt(f.px(b.x) + Scalar(5)) << "\" y=\""
          << fmt(f.py(b.t) - Scalar(5)) << "\">" << escape(name) << "</text>\n";
      continue;
    }
    out << "<line class=\"signal\" x1=\"" << fmt(f.px(b.x)) << "\" y1=\"" << fmt(f.py(b.t))
        << "\" x2=\"" << fmt(f.px(c.x)) << "\" y2=\"" << fmt(f.py(c.t))
        << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    const Scalar half(Scalar::rational(1, 2));
    out << "<text class=\"label\" x=\"" << fmt(f.px((b.x + c.x) * half) + Scalar(5)) << "\" y=\""
        << fmt(f.py((b.t + c.t) * half)) << "\">" << escape(name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

QueryResult evaluate_query(const Scenario& s, const std::string& text, const Corpus& corpus,
                           const Budget& budget) {
  ParseOptions opts;
  opts.defs = &corpus.defs;
  Assignment assignment;
  for (const auto& [name, o] : s.observers) {
    opts.free_sorts[name] = Sort::Ob;
    assignment[name] = o;
  }
  for (const auto& [name, e] : s.signals) {
    opts.free_sorts[name] = Sort::Si;
    assignment[name] = e;
  }
  QueryResult r;
  r.formula = parse_formula(text, opts);
  FormulaPtr f = r.formula;
  const auto free = free_variables(*f, &corpus.defs);
  for (auto it = free.rbegin(); it != free.rend(); ++it) {
    if (assignment.count(it->first)) continue;
    r.existential.insert(r.existential.begin(), it->first);
    f = mk_quant(Kind::Exists, it->first, it->second, f);
  }
  r.verdict = evaluate_bounded(f, s.kind, assignment, budget, &corpus.defs);
  return r;
}

}  // namespace relcheck
