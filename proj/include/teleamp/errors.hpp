// Copyright 2026 The teleamp Authors
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

#include <stdexcept>
#include <string>

namespace teleamp {

/// Base of every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define TELEAMP_DEFINE_ERROR(Name) \
    struct Name : Error {          \
        using Error::Error;        \
    }

TELEAMP_DEFINE_ERROR(CutoffTooSmall);
TELEAMP_DEFINE_ERROR(DegenerateCat);
TELEAMP_DEFINE_ERROR(ShapeMismatch);
TELEAMP_DEFINE_ERROR(MultiModeUnsupported);
TELEAMP_DEFINE_ERROR(BadModeIndex);
TELEAMP_DEFINE_ERROR(BadLoss);
TELEAMP_DEFINE_ERROR(ZeroProbability);
TELEAMP_DEFINE_ERROR(DegenerateSplit);
TELEAMP_DEFINE_ERROR(NoFeasibleRA);
TELEAMP_DEFINE_ERROR(UnsupportedPattern);
TELEAMP_DEFINE_ERROR(SingularEnsemble);
TELEAMP_DEFINE_ERROR(DomainError);
TELEAMP_DEFINE_ERROR(BranchLimitExceeded);
TELEAMP_DEFINE_ERROR(ConfigError);

#undef TELEAMP_DEFINE_ERROR

}  // namespace teleamp
