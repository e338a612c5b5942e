// simdialog: validate, import, play, inventory and serve dialog projects.
//
// Exit codes: 0 success, 1 domain error (validation, parse, runtime), 2 usage.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "simdialog/server.hpp"
#include "simdialog/simdialog.hpp"

namespace fs = std::filesystem;
using namespace simdialog;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// "scope.state=value" or, with `sep` = ' ', "scope.state value".
StateEdit parse_state_edit(std::string_view text, char sep) {
  const auto split = text.rfind(sep);
  if (split == std::string_view::npos) throw UsageError("expected scope.state" + std::string(1, sep) + "value, got '" + std::string(text) + "'");
  const auto key = detail::trim(text.substr(0, split));
  const auto dot = key.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == key.size())
    throw UsageError("state must be written scope.state, got '" + std::string(key) + "'");
  auto value = parse_number(detail::trim(text.substr(split + 1)));
  if (!value) throw UsageError("state value is not a number in '" + std::string(text) + "'");
  return {std::string(key.substr(0, dot)), std::string(key.substr(dot + 1)), *value};
}

Project load_checked(const fs::path& path, bool print_warnings) {
  Project p = load(path);
  const auto diags = validate(p);
  for (const auto& d : diags)
    if (d.severity == Severity::Error || print_warnings) std::cerr << format(d) << '\n';
  if (has_errors(diags)) throw Error(ErrorCode::RefusedInvalid, std::to_string(count(diags, Severity::Error)) + " validation error(s)");
  return p;
}

int cmd_validate(const fs::path& project_path) {
  const Project p = load(project_path);
  const auto diags = validate(p);
  for (const auto& d : diags) std::cout << format(d) << '\n';
  std::cout << count(diags, Severity::Error) << " errors, " << count(diags, Severity::Warning) << " warnings\n";
  return has_errors(diags) ? kDomainError : kOk;
}

struct ImportArgs {
  fs::path script;
  fs::path project;
  std::string page;
  std::string start;
  std::vector<std::string> player_names;
};

int cmd_import(const ImportArgs& args) {
  const auto lines = parse_script(read_file(args.script));
  Project base;
  if (fs::exists(args.project)) base = load(args.project);
  const std::string page = args.page.empty() ? args.script.stem().string() : args.page;
  const std::string start = args.start.empty() ? page : args.start;
  if (base.metadata.title.empty()) base.metadata.title = page;
  ImportOptions options;
  options.player_names = args.player_names;
  auto result = build_graph(lines, std::move(base), page, start, options);
  for (const auto& d : result.diagnostics) std::cerr << format(d) << '\n';
  for (const auto& d : validate(result.project))
    if (d.severity != Severity::Info) std::cerr << format(d) << '\n';
  save(result.project, args.project);
  std::cout << "page '" << page << "': " << result.project.pages.at(page).node_ids.size() << " nodes, start '" << start
            << "' -> " << args.project.string() << '\n';
  return kOk;
}

struct PlayArgs {
  fs::path project;
  std::string start;
  std::optional<fs::path> choices;
  bool interactive = false;
  std::uint64_t seed = 0;
  std::string policy = "argmax";
  double temperature = 1.0;
  std::vector<std::string> sets;
  std::size_t max_steps = 10'000;
};

SelectionPolicy make_policy(const PlayArgs& args) {
  if (args.policy == "argmax") return {SelectionMode::Argmax, 1.0, args.seed};
  if (args.policy == "softmax") {
    if (!(args.temperature > 0.0)) throw UsageError("--temperature must be positive");
    return SelectionPolicy::softmax(args.temperature, args.seed);
  }
  throw UsageError("--policy must be 'argmax' or 'softmax'");
}

int play_interactive(std::shared_ptr<const DialogGraph> graph, const PlayArgs& args, const std::vector<StateEdit>& overrides) {
  Session session = Session::start(graph, args.start, make_policy(args), overrides, {args.max_steps});
  std::size_t shown = 0;
  auto flush = [&] {
    const auto& t = session.transcript();
    std::cout << format_transcript(graph->project(), std::span(t).subspan(shown), shown + 1);
    shown = t.size();
    std::cout << format_rest(session);
  };
  flush();
  std::string line;
  while (session.phase() == Phase::AwaitingChoice) {
    std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    const auto cmd = detail::trim(line);
    if (cmd.empty()) continue;
    if (cmd == "quit" || cmd == "exit") break;
    try {
      if (cmd == "states") {
        std::cout << "player" << format_states(session.player_states()) << '\n';
        for (const auto& [id, s] : session.npc_states()) std::cout << id << format_states(s) << '\n';
      } else if (cmd.starts_with("set ")) {
        const auto edit = parse_state_edit(detail::trim(cmd.substr(4)), ' ');
        session.set_state(edit.scope, edit.name, edit.value);
        std::cout << edit.scope << '.' << edit.name << " = " << format_number(session.state(edit.scope, edit.name)) << '\n';
      } else if (cmd == "help") {
        std::cout << "commands: <number> | <node id> | set <scope>.<state> <value> | states | quit\n";
      } else {
        session.choose(ChoiceToken::parse(cmd).resolve(session.menu_options()));
        flush();
      }
    } catch (const UsageError& e) {
      std::cout << "? " << e.what() << '\n';
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidChoice && e.code() != ErrorCode::NotFound) throw;
      std::cout << "? " << e.detail() << '\n';
    }
  }
  return kOk;
}

int cmd_play(const PlayArgs& args) {
  auto graph = DialogGraph::make(load_checked(args.project, false));
  std::vector<StateEdit> overrides;
  for (const auto& s : args.sets) overrides.push_back(parse_state_edit(s, '='));
  if (args.interactive) return play_interactive(graph, args, overrides);

  std::vector<ChoiceToken> choices;
  std::vector<TimedStateEdit> edits;
  if (args.choices) {
    std::istringstream in(read_file(*args.choices));
    std::string raw;
    while (std::getline(in, raw)) {
      const auto line = detail::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      if (line.starts_with("set ")) edits.push_back({choices.size(), parse_state_edit(detail::trim(line.substr(4)), ' ')});
      else choices.push_back(ChoiceToken::parse(line));
    }
  }
  const Session session = replay(graph, args.start, choices, edits, make_policy(args), overrides, {args.max_steps});
  std::cout << format_transcript(graph->project(), session.transcript()) << format_rest(session);
  return kOk;
}

int cmd_inventory(const fs::path& project_path, const std::optional<fs::path>& assets, bool machine) {
  const auto report = inventory(load(project_path), assets);
  std::cout << (machine ? format_inventory_machine(report) : format_inventory_table(report));
  return kOk;
}

int cmd_serve(const fs::path& project_path, const std::string& host, int port, std::uint64_t seed) {
  auto graph = DialogGraph::make(load_checked(project_path, true));
  ServerOptions options;
  options.host = host;
  options.default_seed = seed;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  SimServer server(graph, options);
  const int bound = server.bind(port);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  std::cerr << "serving '" << project_path.string() << "' on http://" << host << ':' << bound << '\n';
  std::cout << "port " << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() also returns on listen failure; make sure the waiter exits.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simdialog - branching game dialog toolchain"};
  app.require_subcommand(1);

  fs::path validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a project file and print diagnostics");
  validate_cmd->add_option("project", validate_path, "Project XML file")->required();

  ImportArgs import_args;
  auto* import_cmd = app.add_subcommand("import", "Import a screenplay-style script as a new page");
  import_cmd->add_option("script", import_args.script, "Script text file")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("project", import_args.project, "Project XML file (created if missing)")->required();
  import_cmd->add_option("--page", import_args.page, "Page name (default: script file name)");
  import_cmd->add_option("--start", import_args.start, "Start node name (default: page name)");
  import_cmd->add_option("--player-name", import_args.player_names, "Script name of a player character (repeatable)");

  PlayArgs play_args;
  std::string choices_path;
  auto* play_cmd = app.add_subcommand("play", "Play a conversation and print the transcript");
  play_cmd->add_option("project", play_args.project, "Project XML file")->required();
  play_cmd->add_option("--start", play_args.start, "Start node name")->required();
  auto* choices_opt = play_cmd->add_option("--choices", choices_path, "File with one menu index or node id per line");
  auto* interactive_opt = play_cmd->add_flag("--interactive", play_args.interactive, "Prompt for choices on the terminal");
  choices_opt->excludes(interactive_opt);
  play_cmd->add_option("--seed", play_args.seed, "Seed for sampled selection");
  play_cmd->add_option("--policy", play_args.policy, "argmax or softmax")->check(CLI::IsMember({"argmax", "softmax"}));
  play_cmd->add_option("--temperature", play_args.temperature, "Softmax temperature");
  play_cmd->add_option("--set", play_args.sets, "Initial state override scope.state=value (repeatable)");
  play_cmd->add_option("--max-steps", play_args.max_steps, "Auto-advance step limit");

  fs::path inventory_path;
  std::string assets_dir;
  bool machine = false;
  auto* inventory_cmd = app.add_subcommand("inventory", "List dialog assets");
  inventory_cmd->add_option("project", inventory_path, "Project XML file")->required();
  inventory_cmd->add_option("--assets", assets_dir, "Asset root directory to check files against");
  inventory_cmd->add_flag("--machine", machine, "Tab-separated output: path, role, count, exists");

  fs::path serve_path;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::uint64_t serve_seed = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Run the simulation server");
  serve_cmd->add_option("project", serve_path, "Project XML file")->required();
  serve_cmd->add_option("--port", port, "TCP port (0 picks a free one)");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--seed", serve_seed, "Default seed for new sessions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*import_cmd) return cmd_import(import_args);
    if (*play_cmd) {
      if (!choices_path.empty()) play_args.choices = choices_path;
      return cmd_play(play_args);
    }
    if (*inventory_cmd)
      return cmd_inventory(inventory_path, assets_dir.empty() ? std::nullopt : std::optional<fs::path>(assets_dir), machine);
    if (*serve_cmd) return cmd_serve(serve_path, host, port, serve_seed);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}
