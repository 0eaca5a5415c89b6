/*
Copyright 2026 The gfl Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "gfl/error.hpp"
#include "gfl/persistence.hpp"

namespace gfl {

struct FinitePoint {
  double birth, death;  // birth < death, both in [0,1]
  std::uint32_t birth_attr, death_attr;
};

struct EssPoint {
  double birth;
  std::uint32_t birth_attr;
};

/// The three processed barcodes the readout vectorizes: finite 0-dim pairs,
/// essential 0-dim births, essential 1-dim births, each the union of the
/// sublevel barcode and the mirrored superlevel barcode.
///
/// Every coordinate of every point equals the filter value of its attributed
/// vertex (the superlevel mirroring cancels the g = -f negation), so a
/// gradient on a coordinate flows to that vertex's filter value with sign +1.
struct BarcodeSet {
  std::vector<FinitePoint> finite0;
  std::vector<EssPoint> essential0;
  std::vector<EssPoint> essential1;
};

/// Merges the sublevel barcodes of f (values in [0,1]) with the superlevel
/// barcodes computed from g = -f (values in [-1,0]): superlevel finite points
/// (b,d) map to (-d,-b) with attributions swapped, essential births b to -b.
/// Zero-persistence pairs are dropped here and only here.
inline BarcodeSet assemble_processed_barcodes(const RawBarcodes& sub, const RawBarcodes& sup) {
  auto check = [](double x, double lo, double hi) {
    if (!(x >= lo && x <= hi))
      throw DomainError("barcode value " + std::to_string(x) + " outside [" +
                        std::to_string(lo) + "," + std::to_string(hi) + "]");
  };

  BarcodeSet out;
  for (const BarcodePoint& p : sub.b0_finite) {
    if (p.zero_persistence) continue;
    check(p.birth, 0.0, 1.0);
    check(p.death, 0.0, 1.0);
    out.finite0.push_back({p.birth, p.death, p.birth_attr, p.death_attr});
  }
  for (const BarcodePoint& p : sup.b0_finite) {
    if (p.zero_persistence) continue;
    check(p.birth, -1.0, 0.0);
    check(p.death, -1.0, 0.0);
    out.finite0.push_back({-p.death, -p.birth, p.death_attr, p.birth_attr});
  }
  for (const EssentialPoint& p : sub.b0_essential) {
    check(p.birth, 0.0, 1.0);
    out.essential0.push_back({p.birth, p.birth_attr});
  }
  for (const EssentialPoint& p : sup.b0_essential) {
    check(p.birth, -1.0, 0.0);
    out.essential0.push_back({-p.birth, p.birth_attr});
  }
  for (const EssentialPoint& p : sub.b1_essential) {
    check(p.birth, 0.0, 1.0);
    out.essential1.push_back({p.birth, p.birth_attr});
  }
  for (const EssentialPoint& p : sup.b1_essential) {
    check(p.birth, -1.0, 0.0);
    out.essential1.push_back({-p.birth, p.birth_attr});
  }
  return out;
}

/// Line format `dim birth death birth_attr death_attr`, `inf` and -1 standing
/// in for an essential death.
inline void write_barcodes(std::ostream& os, const BarcodeSet& bs) {
  os.precision(17);
  for (const FinitePoint& p : bs.finite0)
    os << 0 << ' ' << p.birth << ' ' << p.death << ' ' << p.birth_attr << ' ' << p.death_attr
       << '\n';
  for (const EssPoint& p : bs.essential0)
    os << 0 << ' ' << p.birth << " inf " << p.birth_attr << " -1\n";
  for (const EssPoint& p : bs.essential1)
    os << 1 << ' ' << p.birth << " inf " << p.birth_attr << " -1\n";
}

}  // namespace gfl
