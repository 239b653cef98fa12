#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

namespace testing {

// Random well-typed expression text. Real-typed subtrees are built from
// abs2/re/im of complex ones so that log and non-integer powers stay legal.
class ExprGen {
 public:
  ExprGen(std::uint64_t seed, int nvars) : rng_(seed), nvars_(nvars) {}

  std::string any(int depth) { return coin(0.5) ? real(depth) : complex(depth); }

  std::string real(int depth) {
    if (depth <= 0) return coin(0.5) ? number() : call("abs2", variable());
    switch (pick(8)) {
      case 0: return "(" + real(depth - 1) + " + " + real(depth - 1) + ")";
      case 1: return real(depth - 1) + " * " + real(depth - 1);
      case 2: return "-" + atom_real(depth - 1);
      case 3: return call("log", "1 + " + call("abs2", complex(depth - 1)));
      case 4: return call("re", complex(depth - 1));
      case 5: return "(1 + " + call("abs2", complex(depth - 1)) + ")^" + real_exponent();
      case 6: return real(depth - 1) + " / (2 + " + call("abs2", complex(depth - 1)) + ")";
      default: return call(pick(2) == 0 ? "im" : "abs2", complex(depth - 1));
    }
  }

  std::string complex(int depth) {
    if (depth <= 0) return pick(3) == 0 ? "i" : variable();
    switch (pick(7)) {
      case 0: return complex(depth - 1) + " + " + any(depth - 1);
      case 1: return "(" + complex(depth - 1) + " - " + any(depth - 1) + ")";
      case 2: return atom_complex(depth - 1) + " * " + atom_complex(depth - 1);
      case 3: return atom_complex(depth - 1) + "^" + std::to_string(pick(4));
      case 4: return call("conj", complex(depth - 1));
      case 5: return call("exp", complex(depth - 1));
      default: return complex(depth - 1) + " / (3 + " + call("abs2", complex(depth - 1)) + ")";
    }
  }

 private:
  std::string atom_real(int depth) { return "(" + real(depth) + ")"; }
  std::string atom_complex(int depth) { return "(" + complex(depth) + ")"; }
  std::string call(const std::string& f, const std::string& arg) { return f + "(" + arg + ")"; }
  std::string variable() { return "z" + std::to_string(1 + pick(nvars_)); }
  std::string number() {
    char buf[64];
    if (coin(0.5))
      std::snprintf(buf, sizeof buf, "%.17g", std::uniform_real_distribution<double>(0.0, 10.0)(rng_));
    else
      std::snprintf(buf, sizeof buf, "%d", pick(20));
    return buf;
  }
  std::string real_exponent() {
    static const char* exps[] = {"0.5", "1.5", "-1", "2", "0.25", "-0.5", "3"};
    return exps[pick(7)];
  }
  int pick(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::mt19937_64 rng_;
  int nvars_;
};

}  // namespace testing
