// Copyright 2026 The KPH Authors.
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

#ifndef KPH_KPH_HPP_
#define KPH_KPH_HPP_

#include "kph/construction.hpp"
#include "kph/dataset.hpp"
#include "kph/errors.hpp"
#include "kph/evaluation.hpp"
#include "kph/graph.hpp"
#include "kph/hierarchy.hpp"
#include "kph/io.hpp"
#include "kph/score_matrix.hpp"
#include "kph/scoring.hpp"
#include "kph/types.hpp"
#include "kph/version.hpp"

#endif  // KPH_KPH_HPP_
