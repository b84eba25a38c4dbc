#include "seqcrt/types.hpp"

#include <cmath>

namespace seqcrt {

void Dataset::validate() const {
  if (x.rows() < 2) throw DomainError("dataset needs at least 2 observations");
  if (x.cols() < 1) throw DomainError("dataset needs at least 1 variable");
  if (y.size() != x.rows())
    throw DomainError("response length " + std::to_string(y.size()) + " does not match " +
                      std::to_string(x.rows()) + " rows");
  if (response_kind == ResponseKind::binary) {
    for (Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw DomainError("binary response takes a value outside {0,1} at row " +
                          std::to_string(i + 1));
  }
}

void SeqStepParams::validate() const {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("SeqStep threshold c must lie in (0,1)");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("nominal FDR level q must lie in (0,1)");
}

bool PValueRecord::at_most(double c) const {
  double scaled = c * (randomizations + 1);
  double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) <= 1e-9 * std::max(1.0, scaled))
    return rank <= static_cast<long long>(nearest);
  return rank < scaled;
}

}  // namespace seqcrt
