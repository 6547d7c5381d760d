// Copyright 2026 The jdpopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef JDP_JDP_HPP_
#define JDP_JDP_HPP_

#include "jdp/analysis.hpp"
#include "jdp/engine.hpp"
#include "jdp/error.hpp"
#include "jdp/mechanism.hpp"
#include "jdp/problem.hpp"
#include "jdp/projection.hpp"

#endif  // JDP_JDP_HPP_
