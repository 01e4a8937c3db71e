// Copyright 2026 The bayermc Authors
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

#include "bayermc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace bayermc {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_workers() {
    if (const char* env = std::getenv("BAYERMC_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
            // unparsable values fall through to the hardware default
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

} // namespace

std::size_t worker_count() {
    const std::size_t o = g_override.load();
    return o > 0 ? o : env_workers();
}

void set_worker_count(std::optional<std::size_t> workers) { g_override.store(workers.value_or(0)); }

ScopedWorkerCount::ScopedWorkerCount(std::size_t workers) {
    const std::size_t o = g_override.load();
    if (o > 0) previous_ = o;
    set_worker_count(workers);
}

ScopedWorkerCount::~ScopedWorkerCount() { set_worker_count(previous_); }

} // namespace bayermc
