/*
 * Copyright 2026 The satexpl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <csignal>
#include <cstring>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "satexpl/errors.hpp"
#include "satexpl/instance.hpp"

namespace satexpl {

/// Black-box prediction source. Implementations must return exactly one label
/// in {0,1} per queried instance and behave deterministically within a run.
class Oracle {
 public:
  explicit Oracle(int batch_size = 1024) : batch_size_(batch_size > 0 ? batch_size : 1) {}
  virtual ~Oracle() = default;

  int batch_size() const { return batch_size_; }

  /// Labels all instances, splitting the work into batch_size chunks.
  std::vector<int> labels(std::span<const Instance> instances) {
    std::vector<int> out;
    out.reserve(instances.size());
    for (std::size_t offset = 0; offset < instances.size();
         offset += static_cast<std::size_t>(batch_size_)) {
      const std::size_t count =
          std::min(static_cast<std::size_t>(batch_size_), instances.size() - offset);
      const std::vector<int> chunk = label_batch(instances.subspan(offset, count));
      if (chunk.size() != count) {
        throw OracleProtocolError("oracle produced " + std::to_string(chunk.size()) +
                                  " labels for " + std::to_string(count) + " instances");
      }
      for (int label : chunk) {
        if (label != 0 && label != 1) {
          throw OracleProtocolError("oracle label out of {0,1}: " + std::to_string(label));
        }
      }
      out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
  }

 protected:
  virtual std::vector<int> label_batch(std::span<const Instance> instances) = 0;

 private:
  int batch_size_;
};

/// Wraps an in-process prediction function.
class FunctionOracle : public Oracle {
 public:
  explicit FunctionOracle(std::function<int(const Instance&)> fn, int batch_size = 1024)
      : Oracle(batch_size), fn_(std::move(fn)) {}

 protected:
  std::vector<int> label_batch(std::span<const Instance> instances) override {
    std::vector<int> out;
    out.reserve(instances.size());
    for (const Instance& x : instances) out.push_back(fn_(x));
    return out;
  }

 private:
  std::function<int(const Instance&)> fn_;
};

/// Answers queries from a table of labeled rows; intended for dataset-mode
/// sampling where every neighbor comes from the table.
class PrecomputedOracle : public Oracle {
 public:
  explicit PrecomputedOracle(const Dataset& data, int batch_size = 1024) : Oracle(batch_size) {
    for (const Instance& row : data.rows) {
      if (!row.label) throw ConfigError("precomputed oracle requires labeled rows");
      auto [it, inserted] = table_.emplace(row.values, *row.label);
      if (!inserted && it->second != *row.label) {
        throw ConfigError("conflicting labels for duplicate row in precomputed oracle");
      }
    }
  }

 protected:
  std::vector<int> label_batch(std::span<const Instance> instances) override {
    std::vector<int> out;
    out.reserve(instances.size());
    for (const Instance& x : instances) {
      auto it = table_.find(x.values);
      if (it == table_.end()) {
        throw OracleProtocolError("no precomputed label for queried instance");
      }
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::map<std::vector<std::uint8_t>, int> table_;
};

/// Spawns a shell command once per batch. Protocol: the child reads one
/// instance per line on standard input as comma-separated 0/1 values,
/// terminated by end-of-stream, and must emit exactly one line per instance
/// containing "0" or "1", in order.
class SubprocessOracle : public Oracle {
 public:
  explicit SubprocessOracle(std::string command, int batch_size = 1024)
      : Oracle(batch_size), command_(std::move(command)) {}

 protected:
  std::vector<int> label_batch(std::span<const Instance> instances) override {
    std::string input;
    for (const Instance& x : instances) {
      for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (i) input += ',';
        input += x.values[i] ? '1' : '0';
      }
      input += '\n';
    }
    const std::string output = run_child(input);

    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < output.size()) {
      std::size_t eol = output.find('\n', pos);
      if (eol == std::string::npos) eol = output.size();
      std::string line = output.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      pos = eol + 1;
      if (line == "0") {
        out.push_back(0);
      } else if (line == "1") {
        out.push_back(1);
      } else if (line.empty()) {
        continue;
      } else {
        throw OracleProtocolError("oracle emitted \"" + line + "\", expected 0 or 1");
      }
    }
    return out;
  }

 private:
  std::string run_child(const std::string& input) const {
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
      throw OracleError("pipe() failed: " + std::string(std::strerror(errno)));
    }
    const pid_t pid = fork();
    if (pid < 0) throw OracleError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);

    // Feed stdin from a separate thread: the child may interleave reading and
    // writing, and a full pipe in either direction must not deadlock us.
    std::thread writer([fd = to_child[1], &input]() {
      std::size_t written = 0;
      while (written < input.size()) {
        const ssize_t n = write(fd, input.data() + written, input.size() - written);
        if (n <= 0) break;  // child closed its stdin early
        written += static_cast<std::size_t>(n);
      }
      close(fd);
    });

    std::string output;
    char buffer[4096];
    for (;;) {
      const ssize_t n = read(from_child[0], buffer, sizeof buffer);
      if (n <= 0) break;
      output.append(buffer, static_cast<std::size_t>(n));
    }
    close(from_child[0]);
    writer.join();

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFSIGNALED(status)) {
      throw OracleExit("oracle command killed by signal " + std::to_string(WTERMSIG(status)));
    }
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
      throw OracleExit("oracle command exited with status " +
                       std::to_string(WEXITSTATUS(status)));
    }
    return output;
  }

  std::string command_;
};

/// Labels every member of the neighborhood through the oracle.
inline NeighborhoodSet label(NeighborhoodSet ns, Oracle& oracle) {
  const std::vector<int> labels = oracle.labels(ns.members);
  for (std::size_t i = 0; i < ns.members.size(); ++i) {
    ns.members[i].label = labels[i];
  }
  if (!ns.members.empty()) ns.center.label = ns.members.front().label;
  return ns;
}

}  // namespace satexpl
