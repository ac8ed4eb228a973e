#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"

namespace blab {

enum class SymbolKind { LogBranch, Monomial, BoundedSmooth, HarmonicFromBoundary, Pole, Constant };

// Symbols b on the ball. Everything depends on z_1 except monomials.
// Named families:
//   bounded smooth: "inverse_shift" 1/(2 - z_1), "exp" e^{z_1}
//   harmonic:       "re_z1" Re z_1, "re_inverse_shift" Re 1/(2 - z_1), "re_log" Re Log(1 - z_1)
class Symbol {
 public:
  static Symbol log_branch() { return Symbol(SymbolKind::LogBranch, "log", true, true, false); }
  static Symbol pole() { return Symbol(SymbolKind::Pole, "pole", true, true, false); }

  static Symbol constant(cplx c) {
    Symbol s(SymbolKind::Constant, "constant", true, true, true);
    s.c_ = c;
    s.sup_ = std::abs(c);
    return s;
  }

  static Symbol monomial(std::vector<int> alpha) {
    for (int a : alpha)
      if (a < 0) throw std::invalid_argument("monomial: negative exponent");
    Symbol s(SymbolKind::Monomial, "monomial", true, true, true);
    s.alpha_ = std::move(alpha);
    s.sup_ = 1.0;
    return s;
  }

  static Symbol bounded_smooth(const std::string& name) {
    Symbol s(SymbolKind::BoundedSmooth, name, true, true, true);
    if (name == "inverse_shift") {
      s.sup_ = 1.0;
    } else if (name == "exp") {
      s.sup_ = std::exp(1.0);
    } else {
      throw std::invalid_argument("unknown bounded symbol: " + name);
    }
    return s;
  }

  static Symbol harmonic(const std::string& name) {
    Symbol s(SymbolKind::HarmonicFromBoundary, name, false, true, name != "re_log");
    if (name == "re_z1" || name == "re_inverse_shift") {
      s.sup_ = 1.0;
    } else if (name != "re_log") {
      throw std::invalid_argument("unknown harmonic symbol: " + name);
    }
    return s;
  }

  // Symbol by its CLI/config name.
  static Symbol parse(const std::string& name) {
    if (name == "log") return log_branch();
    if (name == "pole") return pole();
    if (name == "z1") return monomial({1});
    if (name == "zero") return constant(0.0);
    if (name == "one") return constant(1.0);
    if (name == "inverse_shift" || name == "exp") return bounded_smooth(name);
    if (name.rfind("re_", 0) == 0) return harmonic(name);
    throw std::invalid_argument("unknown symbol: " + name);
  }

  SymbolKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool holomorphic() const { return holomorphic_; }
  bool harmonic() const { return harmonic_; }
  bool bounded() const { return bounded_; }
  // sup |b| over the ball, when bounded
  std::optional<double> sup_abs() const { return bounded_ ? std::optional<double>(sup_) : std::nullopt; }

  cplx operator()(std::span<const cplx> z) const {
    switch (kind_) {
      case SymbolKind::LogBranch:
        return std::log(1.0 - z[0]);
      case SymbolKind::Pole:
        return 1.0 / (1.0 - z[0]);
      case SymbolKind::Constant:
        return c_;
      case SymbolKind::Monomial: {
        if (alpha_.size() > z.size()) throw std::invalid_argument("monomial: dimension mismatch");
        cplx v{1.0, 0.0};
        for (std::size_t j = 0; j < alpha_.size(); ++j) v *= std::pow(z[j], alpha_[j]);
        return v;
      }
      case SymbolKind::BoundedSmooth:
        return name_ == "exp" ? std::exp(z[0]) : 1.0 / (2.0 - z[0]);
      case SymbolKind::HarmonicFromBoundary:
        if (name_ == "re_z1") return z[0].real();
        if (name_ == "re_inverse_shift") return (1.0 / (2.0 - z[0])).real();
        return std::log(std::abs(1.0 - z[0]));
    }
    return {};
  }

  // Holomorphic gradient (d b / d z_j); not defined for the harmonic family.
  std::optional<CVec> gradient(std::span<const cplx> z) const {
    CVec g(z.size(), cplx{0.0, 0.0});
    switch (kind_) {
      case SymbolKind::LogBranch:
        g[0] = -1.0 / (1.0 - z[0]);
        return g;
      case SymbolKind::Pole:
        g[0] = 1.0 / ((1.0 - z[0]) * (1.0 - z[0]));
        return g;
      case SymbolKind::Constant:
        return g;
      case SymbolKind::Monomial:
        for (std::size_t j = 0; j < alpha_.size() && j < z.size(); ++j) {
          if (alpha_[j] == 0) continue;
          cplx v = static_cast<double>(alpha_[j]) * std::pow(z[j], alpha_[j] - 1);
          for (std::size_t i = 0; i < alpha_.size(); ++i)
            if (i != j) v *= std::pow(z[i], alpha_[i]);
          g[j] = v;
        }
        return g;
      case SymbolKind::BoundedSmooth:
        g[0] = name_ == "exp" ? std::exp(z[0]) : 1.0 / ((2.0 - z[0]) * (2.0 - z[0]));
        return g;
      case SymbolKind::HarmonicFromBoundary:
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  Symbol(SymbolKind kind, std::string name, bool holo, bool harm, bool bounded)
      : kind_(kind), name_(std::move(name)), holomorphic_(holo), harmonic_(harm), bounded_(bounded) {}

  SymbolKind kind_;
  std::string name_;
  bool holomorphic_, harmonic_, bounded_;
  cplx c_{0.0, 0.0};
  std::vector<int> alpha_;
  double sup_ = 0.0;
};

}  // namespace blab
