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

#include "vocableak/powerlaw.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "vocableak/errors.h"

namespace vocableak {
namespace {

constexpr std::size_t kMinPoints = 10;
constexpr double kMinAlpha = 1e-9;

struct Regression {
  double slope = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

Regression LeastSquares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  Regression r;
  r.n = x.size();
  r.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - r.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (intercept + r.slope * x[k]);
    rss += e * e;
  }
  r.std_error = std::sqrt(rss / (n - 2.0));
  return r;
}

}  // namespace

PowerLawFit FitPowerLaw(const Vocabulary& vocab, const TokenCounts& counts,
                        std::span<const std::size_t> x_min_grid) {
  if (x_min_grid.empty()) throw ArgumentError("x_min grid is empty");
  double merged_total = 0.0;
  for (std::size_t id = kByteAlphabetSize; id < vocab.size(); ++id) {
    merged_total += static_cast<double>(counts[static_cast<TokenId>(id)]);
  }

  bool any_usable = false;
  PowerLawFit best;
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<double> x, y;
  for (std::size_t x_min : x_min_grid) {
    if (x_min < 1 || x_min >= vocab.size()) continue;
    x.clear();
    y.clear();
    for (std::size_t id = kByteAlphabetSize; id < vocab.size(); ++id) {
      const std::size_t index = Vocabulary::position(static_cast<TokenId>(id));
      const std::int64_t c = counts[static_cast<TokenId>(id)];
      if (index <= x_min || c <= 0) continue;
      x.push_back(std::log(static_cast<double>(index)));
      y.push_back(std::log(static_cast<double>(c) / merged_total));
    }
    if (x.size() < kMinPoints) continue;
    any_usable = true;
    const Regression r = LeastSquares(x, y);
    const double alpha = -r.slope;
    if (!(alpha > kMinAlpha) || !std::isfinite(alpha)) continue;
    if (r.std_error < best_error ||
        (r.std_error == best_error && x_min < best.x_min)) {
      best_error = r.std_error;
      best.alpha = alpha;
      best.x_min = x_min;
      best.std_error = r.std_error;
      best.n_points = r.n;
      best.source_vocab_size = vocab.size();
    }
  }
  if (!any_usable) {
    throw InsufficientDataError("power-law fit needs at least " +
                                std::to_string(kMinPoints) +
                                " merged tokens with non-zero counts");
  }
  if (!std::isfinite(best_error)) {
    throw FitError("power-law fit produced a non-positive exponent");
  }
  return best;
}

std::vector<std::size_t> DefaultXminGrid(std::size_t vocab_size) {
  std::vector<std::size_t> grid = {kByteAlphabetSize};
  if (vocab_size > kByteAlphabetSize) {
    const std::size_t merged = vocab_size - kByteAlphabetSize;
    for (std::size_t frac : {10, 4, 2}) {
      grid.push_back(kByteAlphabetSize + merged / frac);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

SiBoundTable::SiBoundTable(const PowerLawFit& fit, std::size_t vocab_size)
    : alpha_(fit.alpha), x_min_(fit.x_min), vocab_size_(vocab_size) {
  if (vocab_size <= fit.x_min) {
    throw ArgumentError("vocabulary size must exceed x_min");
  }
  // Summed smallest-first for accuracy.
  double tail = 0.0;
  for (std::size_t j = vocab_size; j > fit.x_min; --j) {
    tail += std::pow(static_cast<double>(j), -fit.alpha);
  }
  log_tail_sum_ = std::log(tail);
}

double SiBoundTable::operator()(std::size_t merge_index) const {
  if (merge_index <= x_min_ || merge_index > vocab_size_) {
    throw ArgumentError("merge index " + std::to_string(merge_index) +
                        " outside (x_min, vocab_size]");
  }
  return alpha_ * std::log(static_cast<double>(merge_index)) + log_tail_sum_;
}

double SiLowerBound(const PowerLawFit& fit, std::size_t merge_index,
                    std::size_t vocab_size) {
  if (merge_index <= fit.x_min) {
    throw ArgumentError("merge index must exceed x_min");
  }
  if (vocab_size < merge_index) {
    throw ArgumentError("merge index exceeds vocabulary size");
  }
  return SiBoundTable(fit, vocab_size)(merge_index);
}

std::string FitToJson(const PowerLawFit& fit) {
  nlohmann::json j = {{"alpha", fit.alpha},
                      {"x_min", fit.x_min},
                      {"stderr", fit.std_error},
                      {"n_points", fit.n_points},
                      {"source_vocab_size", fit.source_vocab_size}};
  return j.dump(2) + "\n";
}

PowerLawFit FitFromJson(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    PowerLawFit fit;
    fit.alpha = j.at("alpha").get<double>();
    fit.x_min = j.at("x_min").get<std::size_t>();
    fit.std_error = j.at("stderr").get<double>();
    fit.n_points = j.value("n_points", std::size_t{0});
    fit.source_vocab_size = j.value("source_vocab_size", std::size_t{0});
    if (!(fit.alpha > 0.0) || fit.x_min < 1) {
      throw FitError("fit report violates alpha > 0, x_min >= 1");
    }
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("<fit>", 0, e.what());
  }
}

}  // namespace vocableak
