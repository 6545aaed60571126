// The convex weight family entering the weighted monotonicity formulas:
// constants, truncated-linear ramps (the Harnack proof's f_1, f_2), and |a.x|.
#pragma once

#include <gmtlab/geometry.hpp>

#include <sstream>
#include <string>

namespace gmtlab {

class ConvexWeight {
public:
  enum class Kind { Constant, TruncLinear, AbsLinear };

  static ConvexWeight constant(int d, double c) {
    if (c < 0) throw error("ConvexWeight: constant must be non-negative");
    ConvexWeight f;
    f.kind_ = Kind::Constant;
    f.a_ = Vec::Zero(d);
    f.y0_ = Vec::Zero(d);
    f.c_ = c;
    return f;
  }

  /// (a.(x - y0) - c)^+ with |a| <= 1.
  static ConvexWeight trunc_linear(const Vec& a, const Vec& y0, double c) {
    if (a.norm() > 1.0 + 1e-12) throw error("ConvexWeight: need |a| <= 1");
    ConvexWeight f;
    f.kind_ = Kind::TruncLinear;
    f.a_ = a;
    f.y0_ = y0;
    f.c_ = c;
    return f;
  }

  /// |a.x| with |a| <= 1.
  static ConvexWeight abs_linear(const Vec& a) {
    if (a.norm() > 1.0 + 1e-12) throw error("ConvexWeight: need |a| <= 1");
    ConvexWeight f;
    f.kind_ = Kind::AbsLinear;
    f.a_ = a;
    f.y0_ = Vec::Zero(a.size());
    f.c_ = 0.0;
    return f;
  }

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(a_.size()); }

  double value(const Vec& x) const {
    switch (kind_) {
      case Kind::Constant: return c_;
      case Kind::TruncLinear: return std::max(a_.dot(x - y0_) - c_, 0.0);
      case Kind::AbsLinear: return std::abs(a_.dot(x));
    }
    return 0.0;
  }

  /// A subgradient; away from the kink it is the gradient, |.| <= 1 everywhere.
  Vec subgradient(const Vec& x) const {
    switch (kind_) {
      case Kind::Constant: return Vec::Zero(a_.size());
      case Kind::TruncLinear: return a_.dot(x - y0_) - c_ > 0 ? a_ : Vec::Zero(a_.size());
      case Kind::AbsLinear: return a_.dot(x) >= 0 ? a_ : Vec(-a_);
    }
    return Vec::Zero(a_.size());
  }

  /// Scenario-config form: `const <c>` | `tlin <a..> <y0..> <c>` | `abslin <a..>`.
  std::string serialize() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::Constant:
        os << "const " << c_;
        break;
      case Kind::TruncLinear:
        os << "tlin";
        for (int i = 0; i < a_.size(); ++i) os << ' ' << a_[i];
        for (int i = 0; i < y0_.size(); ++i) os << ' ' << y0_[i];
        os << ' ' << c_;
        break;
      case Kind::AbsLinear:
        os << "abslin";
        for (int i = 0; i < a_.size(); ++i) os << ' ' << a_[i];
        break;
    }
    return os.str();
  }

  static ConvexWeight parse(const std::string& text, int d) {
    std::istringstream is(text);
    std::string tag;
    is >> tag;
    auto read_vec = [&](int n) {
      Vec v(n);
      for (int i = 0; i < n; ++i)
        if (!(is >> v[i])) throw error("ConvexWeight: malformed spec '" + text + "'");
      return v;
    };
    if (tag == "const") {
      double c;
      if (!(is >> c)) throw error("ConvexWeight: malformed spec '" + text + "'");
      return constant(d, c);
    }
    if (tag == "tlin") {
      Vec a = read_vec(d), y0 = read_vec(d);
      double c;
      if (!(is >> c)) throw error("ConvexWeight: malformed spec '" + text + "'");
      return trunc_linear(a, y0, c);
    }
    if (tag == "abslin") return abs_linear(read_vec(d));
    throw error("ConvexWeight: unknown kind '" + tag + "'");
  }

private:
  Kind kind_ = Kind::Constant;
  Vec a_;
  Vec y0_;
  double c_ = 0.0;
};

}  // namespace gmtlab
