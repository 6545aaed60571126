// DVF / DVFLOW file formats.
//
//   DVF 1
//   dim <d> <m>
//   lambda <float>
//   atoms <N>
//   <x_1..x_d> <weight> <multiplicity> <H_1..H_d> <b_11..b_1d> ... <b_m1..b_md>
//
// Flow files: "DVFLOW 1", "frames <K>", then K blocks of "t <float>" followed
// by a DVF body without its first line. Whitespace-separated decimals, `#`
// starts a comment line, LF line endings. Parsing uses std::from_chars and is
// locale independent; floats are written with 17 significant digits.
#pragma once

#include <gmtlab/brakke_flow.hpp>
#include <gmtlab/varifold.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gmtlab {

namespace detail {

class LineTokens {
public:
  explicit LineTokens(std::istream& in) : in_(in) {}

  /// Next non-comment, non-empty line split into tokens.
  bool next(std::vector<std::string>& out, int* line_no = nullptr) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      size_t pos = line.find_first_not_of(" \t");
      if (pos == std::string::npos || line[pos] == '#') continue;
      out.clear();
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) out.push_back(tok);
      if (line_no) *line_no = line_;
      return true;
    }
    return false;
  }

  int line() const { return line_; }

private:
  std::istream& in_;
  int line_ = 0;
};

inline double parse_double(const std::string& tok, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw error("dvf: malformed number '" + tok + "' at line " + std::to_string(line));
  return v;
}

inline long parse_int(const std::string& tok, int line) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw error("dvf: malformed integer '" + tok + "' at line " + std::to_string(line));
  return v;
}

inline void write_double(std::ostream& os, double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  os.write(buf, p - buf);
}

/// Reads the DVF body (everything after the "DVF 1" header line).
inline DiscreteVarifold read_dvf_body(LineTokens& lines, std::vector<std::string>* warnings) {
  std::vector<std::string> tok;
  int ln = 0;
  if (!lines.next(tok, &ln) || tok.size() != 3 || tok[0] != "dim")
    throw error("dvf: expected 'dim <d> <m>' at line " + std::to_string(lines.line()));
  int d = static_cast<int>(parse_int(tok[1], ln));
  int m = static_cast<int>(parse_int(tok[2], ln));
  GeometryContext ctx(d, m);

  if (!lines.next(tok, &ln) || tok.size() != 2 || tok[0] != "lambda")
    throw error("dvf: expected 'lambda <float>' at line " + std::to_string(lines.line()));
  double lambda = parse_double(tok[1], ln);

  if (!lines.next(tok, &ln) || tok.size() != 2 || tok[0] != "atoms")
    throw error("dvf: expected 'atoms <N>' at line " + std::to_string(lines.line()));
  long n = parse_int(tok[1], ln);

  DiscreteVarifold v(ctx);
  v.reserve(static_cast<int>(n));
  const size_t expected = static_cast<size_t>(2 * d + 2 + m * d);
  for (long i = 0; i < n; ++i) {
    if (!lines.next(tok, &ln))
      throw error("dvf: atom count mismatch, expected " + std::to_string(n) + " atoms, file ends after " +
                  std::to_string(i) + " (line " + std::to_string(lines.line()) + ")");
    if (tok.size() != expected)
      throw error("dvf: atom line " + std::to_string(ln) + " has " + std::to_string(tok.size()) +
                  " fields, expected " + std::to_string(expected));
    size_t c = 0;
    Vec x(d), H(d);
    for (int k = 0; k < d; ++k) x[k] = parse_double(tok[c++], ln);
    double w = parse_double(tok[c++], ln);
    double mult = parse_double(tok[c++], ln);
    for (int k = 0; k < d; ++k) H[k] = parse_double(tok[c++], ln);
    Mat basis(m, d);
    for (int r = 0; r < m; ++r)
      for (int k = 0; k < d; ++k) basis(r, k) = parse_double(tok[c++], ln);

    Mat gram = basis * basis.transpose();
    double dev = (gram - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
    if (dev > 1e-6)
      throw error("dvf: atom line " + std::to_string(ln) +
                  ": basis deviates from orthonormal by " + std::to_string(dev));
    if (dev > 1e-10) {
      Plane fixed = Plane::from_span(basis.transpose());
      basis = fixed.basis().transpose();
      if (warnings)
        warnings->push_back("atom line " + std::to_string(ln) +
                            ": basis re-orthonormalized (deviation " + std::to_string(dev) + ")");
    }
    v.add_atom(x, w, mult, H, basis);
  }
  v.finalize(lambda);
  return v;
}

inline void write_dvf_body(std::ostream& os, const DiscreteVarifold& v) {
  const auto& ctx = v.context();
  os << "dim " << ctx.d << ' ' << ctx.m << "\n";
  os << "lambda ";
  write_double(os, v.lambda());
  os << "\natoms " << v.size() << "\n";
  for (int i = 0; i < v.size(); ++i) {
    Vec x = v.position(i), H = v.curvature(i);
    for (int k = 0; k < ctx.d; ++k) {
      if (k) os << ' ';
      write_double(os, x[k]);
    }
    os << ' ';
    write_double(os, v.weight(i));
    os << ' ';
    write_double(os, v.multiplicity(i));
    for (int k = 0; k < ctx.d; ++k) {
      os << ' ';
      write_double(os, H[k]);
    }
    Eigen::Ref<const Mat> rows = v.basis_rows(i);
    for (int r = 0; r < ctx.m; ++r)
      for (int k = 0; k < ctx.d; ++k) {
        os << ' ';
        write_double(os, rows(r, k));
      }
    os << "\n";
  }
}

}  // namespace detail

inline DiscreteVarifold load_varifold(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  detail::LineTokens lines(in);
  std::vector<std::string> tok;
  if (!lines.next(tok) || tok.size() != 2 || tok[0] != "DVF" || tok[1] != "1")
    throw error("dvf: malformed header, expected 'DVF 1'");
  return detail::read_dvf_body(lines, warnings);
}

inline DiscreteVarifold load_varifold(const std::string& path,
                                      std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw error("dvf: cannot open '" + path + "'");
  return load_varifold(in, warnings);
}

inline void save_varifold(std::ostream& os, const DiscreteVarifold& v) {
  os << "DVF 1\n";
  detail::write_dvf_body(os, v);
}

inline void save_varifold(const std::string& path, const DiscreteVarifold& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("dvf: cannot write '" + path + "'");
  save_varifold(os, v);
}

/// DVFLOW carries no transport columns; loaded tracks get v = 0, lambda_v = 0.
inline FlowTrack load_flow(std::istream& in) {
  detail::LineTokens lines(in);
  std::vector<std::string> tok;
  int ln = 0;
  if (!lines.next(tok) || tok.size() != 2 || tok[0] != "DVFLOW" || tok[1] != "1")
    throw error("dvflow: malformed header, expected 'DVFLOW 1'");
  if (!lines.next(tok, &ln) || tok.size() != 2 || tok[0] != "frames")
    throw error("dvflow: expected 'frames <K>'");
  long k = detail::parse_int(tok[1], ln);
  FlowTrack track("dvflow-file");
  for (long i = 0; i < k; ++i) {
    if (!lines.next(tok, &ln) || tok.size() != 2 || tok[0] != "t")
      throw error("dvflow: expected 't <float>' for frame " + std::to_string(i));
    double t = detail::parse_double(tok[1], ln);
    track.add_frame(t, detail::read_dvf_body(lines, nullptr));
  }
  track.finalize(0.0);
  return track;
}

inline FlowTrack load_flow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("dvflow: cannot open '" + path + "'");
  return load_flow(in);
}

inline void save_flow(std::ostream& os, const FlowTrack& track) {
  os << "DVFLOW 1\nframes " << track.size() << "\n";
  for (int k = 0; k < track.size(); ++k) {
    os << "t ";
    detail::write_double(os, track.frame(k).t);
    os << "\n";
    detail::write_dvf_body(os, track.frame(k).v);
  }
}

inline void save_flow(const std::string& path, const FlowTrack& track) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("dvflow: cannot write '" + path + "'");
  save_flow(os, track);
}

}  // namespace gmtlab
