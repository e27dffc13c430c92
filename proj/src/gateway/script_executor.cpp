#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <regex>
#include <thread>

#include "zkmlops/common/error.hpp"
#include "zkmlops/gateway/executor.hpp"

namespace zkmlops::gateway {

namespace fs = std::filesystem;

namespace {

fs::path default_scratch_root() {
  if (const char* env = std::getenv("ZKMLOPS_SCRATCH"); env && *env) return env;
  return fs::temp_directory_path() / "zkmlops-scratch";
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string fresh_name(std::string_view step) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return std::string(step) + "-" + buf;
}

std::string tail(const fs::path& log, std::size_t max = 2000) {
  std::error_code ec;
  if (!fs::exists(log, ec)) return {};
  std::string s = zkmlops::to_string(read_file(log));
  if (s.size() > max) s = s.substr(s.size() - max);
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

struct SlotGuard {
  std::counting_semaphore<1024>& s;
  explicit SlotGuard(std::counting_semaphore<1024>& sem) : s(sem) { s.acquire(); }
  ~SlotGuard() { s.release(); }
};

}  // namespace

std::string expand_command(const StepSpec& step, const fs::path& scratch) {
  if (!step.command_template) throw Error(Errc::SchemaError, "step '" + step.step_name + "' has no command_template");
  static const std::regex token(R"(\{([^{}]*)\})");
  const std::string& tpl = *step.command_template;
  std::string out;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(tpl.begin(), tpl.end(), token); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    auto pos = static_cast<std::size_t>(m.position(0));
    out.append(tpl, last, pos - last);
    last = pos + static_cast<std::size_t>(m.length(0));
    std::string name = m[1].str();
    if (pos > 0 && tpl[pos - 1] == '$') {
      out += m.str(0);
      continue;
    }
    auto declared = [&](const std::vector<std::string>& kinds, const std::string& k) {
      return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    };
    if (name == "scratch") {
      out += shell_quote(scratch.string());
    } else if (name.rfind("in:", 0) == 0 && declared(step.inputs, name.substr(3))) {
      out += shell_quote((scratch / "in" / name.substr(3)).string());
    } else if (name.rfind("out:", 0) == 0 && declared(step.outputs, name.substr(4))) {
      out += shell_quote((scratch / "out" / name.substr(4)).string());
    } else {
      throw Error(Errc::SchemaError, "unresolved placeholder {" + name + "} in step '" + step.step_name + "'");
    }
  }
  out.append(tpl, last, std::string::npos);
  return out;
}

ScriptExecutor::ScriptExecutor(ScriptOptions options)
    : options_(std::move(options)), slots_(std::max(1u, std::min(options_.max_parallel, 1024u))) {
  if (options_.scratch_root.empty()) options_.scratch_root = default_scratch_root();
  fs::create_directories(options_.scratch_root);
  options_.scratch_root = fs::canonical(options_.scratch_root);
}

StepOutcome ScriptExecutor::run(const WorkflowConfig& config, const StepSpec& step, const ArtifactMap& inputs) {
  const fs::path scratch = options_.scratch_root / fresh_name(config.id + "-" + step.step_name);
  const std::string command = expand_command(step, scratch);

  SlotGuard slot(slots_);
  fs::create_directories(scratch / "in");
  fs::create_directories(scratch / "out");
  for (const auto& kind : step.inputs) {
    auto it = inputs.find(kind);
    if (it == inputs.end()) throw Error(Errc::MissingPrecondition, "input '" + kind + "' not supplied");
    write_file_atomic(scratch / "in" / kind, it->second);
  }
  const fs::path log = scratch / "step.log";
  auto fail = [&](Errc code, const std::string& what) -> Error {
    std::string msg = "step '" + step.step_name + "' " + what + " (scratch kept at " + scratch.string() + ")";
    if (auto t = tail(log); !t.empty()) msg += ": " + t;
    return Error(code, msg);
  };

  pid_t pid = fork();
  if (pid < 0) throw Error(Errc::Io, "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    if (chdir(scratch.c_str()) != 0) _exit(127);
    int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      dup2(fd, STDERR_FILENO);
      close(fd);
    }
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);

  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(step.timeout_seconds);
  int status = 0;
  auto pause = std::chrono::microseconds(200);
  for (;;) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw fail(Errc::Io, "could not be waited for");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw fail(Errc::Timeout, "timed out after " + std::to_string(step.timeout_seconds) + " s");
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(20000));
  }
  // Reap anything the script left running in its group.
  kill(-pid, SIGKILL);

  int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  const bool is_verify = step.step_name == "verify";
  if (code != 0 && !(is_verify && code == 10)) throw fail(Errc::NonZeroExit, "exited with status " + std::to_string(code));

  StepOutcome out;
  for (const auto& kind : step.outputs) {
    fs::path p = scratch / "out" / kind;
    std::error_code ec;
    if (!fs::is_regular_file(p, ec) || fs::file_size(p, ec) == 0)
      throw fail(Errc::MissingOutput, "did not produce declared output '" + kind + "'");
    out.produced[kind] = read_file(p);
  }
  if (is_verify) out.verdict = BackendVerdict{code == 0, tail(log)};
  std::error_code ec;
  fs::remove_all(scratch, ec);
  return out;
}

BackendGateway::BackendGateway(ScriptOptions options)
    : reference_(std::make_unique<ReferenceExecutor>()),
      external_(std::make_unique<ScriptExecutor>(std::move(options))) {}

BackendGateway::BackendGateway(std::unique_ptr<StepExecutor> reference, std::unique_ptr<StepExecutor> external)
    : reference_(std::move(reference)), external_(std::move(external)) {}

StepOutcome BackendGateway::execute_step(const WorkflowConfig& config, std::string_view step_name,
                                         const ArtifactMap& inputs) {
  const StepSpec& step = config.step(step_name);
  for (const auto& kind : step.inputs)
    if (!inputs.count(kind)) throw Error(Errc::MissingPrecondition, "input '" + kind + "' not supplied");
  StepExecutor& exec = step.executor == ExecutorKind::ExternalScript ? *external_ : *reference_;
  return exec.run(config, step, inputs);
}

}  // namespace zkmlops::gateway
