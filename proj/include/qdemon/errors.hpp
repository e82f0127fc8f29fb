// Copyright 2026 The qdemon Authors
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

namespace qdemon {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Operands of incompatible dimension, or a dimension outside {2, 4}.
class DimensionError : public Error {
   public:
    using Error::Error;
};

/// A caller violated an operation's precondition (bad spin index, T <= 0,
/// wrong parameter regime, ...). The CLI maps these to exit code 2.
class PreconditionError : public Error {
   public:
    using Error::Error;
};

/// A computed value broke a physical or algebraic invariant. The CLI maps
/// these to exit code 3.
class InvariantError : public Error {
   public:
    using Error::Error;
};

/// Pulse-program syntax error. Always carries a 1-based line and column.
class ParseError : public Error {
   public:
    ParseError(int line, int column, const std::string &message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {
    }

    int line() const {
        return line_;
    }
    int column() const {
        return column_;
    }

   private:
    int line_;
    int column_;
};

}  // namespace qdemon
