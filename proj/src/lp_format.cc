// Copyright 2026 The ODMTS Authors
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

#include <cmath>
#include <limits>

#include "odmts/lp.h"

namespace odmts {
namespace {

void Term(std::ostream& out, double coeff, int var, bool first) {
  if (coeff < 0) {
    out << " - " << -coeff << " x" << var;
  } else {
    out << (first ? " " : " + ") << coeff << " x" << var;
  }
}

}  // namespace

void WriteLpFormat(const LinearProgram& lp, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "\\ generated by odmts\nMinimize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.cost(j) == 0.0) continue;
    Term(out, lp.cost(j), j, first);
    first = false;
  }
  if (first) out << " 0 x0";
  out << "\nSubject To\n";

  std::vector<std::vector<std::pair<int, double>>> rows(lp.num_rows());
  for (int j = 0; j < lp.num_variables(); ++j)
    for (const auto& [r, v] : lp.column(j)) rows[r].emplace_back(j, v);
  for (int i = 0; i < lp.num_rows(); ++i) {
    out << " r" << i << ":";
    bool first_term = true;
    for (const auto& [j, v] : rows[i]) {
      Term(out, v, j, first_term);
      first_term = false;
    }
    if (first_term) out << " 0 x0";
    switch (lp.sense(i)) {
      case RowSense::kLessEqual:
        out << " <= ";
        break;
      case RowSense::kEqual:
        out << " = ";
        break;
      case RowSense::kGreaterEqual:
        out << " >= ";
        break;
    }
    out << lp.rhs(i) << "\n";
  }

  out << "Bounds\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    if (std::isinf(lo) && std::isinf(hi)) {
      out << " x" << j << " free\n";
    } else if (lo == hi) {
      out << " x" << j << " = " << lo << "\n";
    } else {
      out << " ";
      if (std::isinf(lo)) {
        out << "-inf";
      } else {
        out << lo;
      }
      out << " <= x" << j << " <= ";
      if (std::isinf(hi)) {
        out << "+inf";
      } else {
        out << hi;
      }
      out << "\n";
    }
  }
  out << "End\n";
  out.precision(old_precision);
}

}  // namespace odmts
