/*
 * Copyright 2026 The mgpkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */


#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace mgpkit::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kData = 3,
    kNumerical = 4,
};

/// Runs one command line. `args` excludes the program name. Human-readable
/// results go to `out`; key=value log lines and errors go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace mgpkit::cli
