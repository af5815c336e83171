#pragma once

#include "nesy/tasks/common.h"

#include <filesystem>
#include <map>
#include <string>

namespace nesy::cli {

/**
 * Flat key = value text: one setting per line, '#' starts a comment,
 * surrounding whitespace ignored. Throws ConfigError on a line without '='
 * or a repeated key.
 */
std::map<std::string, std::string> parseSettings(const std::string& text);
std::map<std::string, std::string> readSettings(const std::filesystem::path& path);

/**
 * Applies settings to a config. Keys: task, semiring, interplay, epochs,
 * batch_size, lr, seed, data_dir, out_dir, train_count, test_count, eta,
 * samples, conjunction_only, checkpoint_dir. "task" resets the other
 * fields to that task's defaults, so it is applied first. Unknown keys and
 * malformed values are ConfigError.
 */
void applySettings(tasks::RunConfig& config, const std::map<std::string, std::string>& settings);

/** The settings that reproduce `config` (round trips through applySettings). */
std::map<std::string, std::string> toSettings(const tasks::RunConfig& config);
std::string formatSettings(const std::map<std::string, std::string>& settings);

}  // namespace nesy::cli
