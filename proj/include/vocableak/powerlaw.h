// Copyright 2026 The VocabLeak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Merge index vs. training frequency as a power law, Pr(t_i) ~ 1/i^alpha for
// i > x_min, and the self-information lower bound that follows from it:
//
//   -log Pr(t_i) >= log( sum_{j=x_min+1}^{|V|} i^alpha / j^alpha ).
//
// The normalising constant never has to be known.

#ifndef VOCABLEAK_POWERLAW_H_
#define VOCABLEAK_POWERLAW_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vocableak/bpe.h"
#include "vocableak/counts.h"

namespace vocableak {

struct PowerLawFit {
  double alpha = 0.0;
  std::size_t x_min = 0;
  // Residual standard error of the log-log regression.
  double std_error = 0.0;
  std::size_t n_points = 0;
  std::size_t source_vocab_size = 0;
};

// Least squares of log(relative frequency) on log(merge index) over merged
// tokens with index > x_min and non-zero count, for each x_min in the grid;
// keeps the candidate with the smallest residual standard error (smaller
// x_min on ties). Relative frequency is normalised over merged tokens.
//
// Throws InsufficientDataError when no candidate has 10 usable points and
// FitError when every usable candidate has alpha <= 0.
PowerLawFit FitPowerLaw(const Vocabulary& vocab, const TokenCounts& counts,
                        std::span<const std::size_t> x_min_grid);

// A default grid for a vocabulary of the given size: 256 plus a few
// quantiles of the merged range.
std::vector<std::size_t> DefaultXminGrid(std::size_t vocab_size);

// log(sum_{j=x_min+1}^{vocab_size} merge_index^alpha / j^alpha), natural log.
// Throws ArgumentError unless x_min < merge_index <= vocab_size.
double SiLowerBound(const PowerLawFit& fit, std::size_t merge_index,
                    std::size_t vocab_size);

// SiLowerBound with the j-sum hoisted, for evaluating many indices against
// one vocabulary size.
class SiBoundTable {
 public:
  SiBoundTable(const PowerLawFit& fit, std::size_t vocab_size);
  double operator()(std::size_t merge_index) const;

 private:
  double alpha_;
  std::size_t x_min_;
  std::size_t vocab_size_;
  double log_tail_sum_;
};

// {"alpha", "x_min", "stderr", "n_points", "source_vocab_size"}
std::string FitToJson(const PowerLawFit& fit);
PowerLawFit FitFromJson(std::string_view json);

}  // namespace vocableak

#endif  // VOCABLEAK_POWERLAW_H_
