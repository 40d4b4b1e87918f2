#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace floodrisk {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// One pipeline step: the files it consumed and produced (by role) and the
/// parameters it ran with.
struct StepRecord
{
	std::string command;
	std::vector<std::pair<std::string, std::filesystem::path>> inputs;
	std::vector<std::pair<std::string, std::filesystem::path>> outputs;
	std::map<std::string, std::string> params;
};

/// Single JSON line with a digest for every input and output file.
std::string format_step_record(const StepRecord& step);

/// Appends format_step_record(step) to the JSON-lines manifest.
void append_step_record(const std::filesystem::path& manifest, const StepRecord& step);

} // namespace floodrisk
