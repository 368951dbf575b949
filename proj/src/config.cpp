// SPDX-License-Identifier: Apache-2.0

#include "onebit/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "onebit/errors.hpp"

namespace onebit {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

void SystemConfig::validate() const {
  require(n_users >= 1, "n_users must be >= 1");
  require(n_rx >= 1, "n_rx must be >= 1");
  require(oversampling >= 1, "oversampling must be >= 1");
  require(block_len >= 1, "block_len must be >= 1");
  require(pilot_len >= 1, "pilot_len must be >= 1");
  require(rolloff > 0.0 && rolloff <= 1.0, "rolloff must lie in (0, 1]");
  require(noise_std > 0.0 && std::isfinite(noise_std), "noise_std must be positive and finite");
  require(forgetting > 0.0 && forgetting <= 1.0, "forgetting must lie in (0, 1]");

  // 3MN x N_r noise samples is the largest index product anywhere in the model.
  constexpr auto kMax = static_cast<double>(std::numeric_limits<int>::max());
  const double longest = 3.0 * oversampling * std::max(block_len, pilot_len) * double(n_rx);
  require(longest < kMax, "dimension product 3*M*N*N_r overflows the index type");
  require(double(n_rx) * n_users < kMax, "dimension product N_r*N_t overflows the index type");
}

SystemConfig SystemConfig::with_block_len(int n) const {
  SystemConfig out = *this;
  out.block_len = n;
  return out;
}

double noise_std_from_snr_db(double snr_db, int n_users) {
  return std::sqrt(n_users / std::pow(10.0, snr_db / 10.0));
}

double snr_db_from_noise_std(double noise_std, int n_users) {
  return 10.0 * std::log10(n_users / (noise_std * noise_std));
}

}  // namespace onebit
