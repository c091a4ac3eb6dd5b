// Copyright 2026 The esqkd Authors
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

#pragma once

#include "esqkd/adversary.hpp"
#include "esqkd/analysis.hpp"
#include "esqkd/bell.hpp"
#include "esqkd/custody.hpp"
#include "esqkd/knowledge.hpp"
#include "esqkd/protocol.hpp"
#include "esqkd/random.hpp"
#include "esqkd/roles.hpp"
#include "esqkd/state_vector.hpp"
#include "esqkd/transcript.hpp"
#include "esqkd/verify.hpp"
