//
// Copyright 2026 The LDP Sampling Authors
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
//

#ifndef LDP_SAMPLING_HPP_
#define LDP_SAMPLING_HPP_

#include "ldp_sampling/continuous.hpp"
#include "ldp_sampling/distributions.hpp"
#include "ldp_sampling/divergence.hpp"
#include "ldp_sampling/errors.hpp"
#include "ldp_sampling/ext_real.hpp"
#include "ldp_sampling/finite.hpp"
#include "ldp_sampling/harness.hpp"
#include "ldp_sampling/numerics.hpp"

#endif  // LDP_SAMPLING_HPP_
