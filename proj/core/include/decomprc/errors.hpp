// Copyright 2026 The DecompRC Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace decomprc {

/// Root of every error the library throws. Callers that only care about
/// "something in the pipeline failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DECOMPRC_DEFINE_ERROR(Name)      \
    class Name : public Error {          \
    public:                              \
        using Error::Error;              \
    }

// core
DECOMPRC_DEFINE_ERROR(EmptyQuestion);
DECOMPRC_DEFINE_ERROR(ParseError);
DECOMPRC_DEFINE_ERROR(ArityError);

// pointer
DECOMPRC_DEFINE_ERROR(ShapeError);
DECOMPRC_DEFINE_ERROR(MissingEmbedding);

// decompose
DECOMPRC_DEFINE_ERROR(SpanError);
DECOMPRC_DEFINE_ERROR(NotComparison);
DECOMPRC_DEFINE_ERROR(UnsupportedComparison);
DECOMPRC_DEFINE_ERROR(RewriteError);

// discrete ops
DECOMPRC_DEFINE_ERROR(ValueParseError);
DECOMPRC_DEFINE_ERROR(TypeMismatch);
DECOMPRC_DEFINE_ERROR(AmbiguousComparison);

// rc backend
DECOMPRC_DEFINE_ERROR(NoContext);
DECOMPRC_DEFINE_ERROR(MissingScores);

// orchestrate
DECOMPRC_DEFINE_ERROR(NoAnswer);

// retrieval
DECOMPRC_DEFINE_ERROR(EmptyCorpus);
DECOMPRC_DEFINE_ERROR(InsufficientDistractors);

// eval
DECOMPRC_DEFINE_ERROR(InversionError);

#undef DECOMPRC_DEFINE_ERROR

}  // namespace decomprc
