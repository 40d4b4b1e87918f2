#include "floodrisk/manifest.hpp"

#include "floodrisk/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace floodrisk {

std::string sha256_file(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open '" + path.string() + "' for hashing");

	std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
	if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
		throw Error("SHA-256 initialisation failed");
	std::array<char, 1 << 16> buf{};
	while (in) {
		in.read(buf.data(), buf.size());
		if (in.gcount() > 0)
			EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
	}
	std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
	unsigned int len = 0;
	EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

	static constexpr char kHex[] = "0123456789abcdef";
	std::string out;
	for (unsigned int k = 0; k < len; ++k) {
		out += kHex[md[k] >> 4];
		out += kHex[md[k] & 0xF];
	}
	return out;
}

std::string format_step_record(const StepRecord& step)
{
	using nlohmann::ordered_json;
	auto files = [](const auto& list) {
		ordered_json arr = ordered_json::array();
		for (const auto& [role, path] : list)
			arr.push_back({{"role", role}, {"path", path.string()}, {"sha256", sha256_file(path)}});
		return arr;
	};
	ordered_json j;
	j["command"] = step.command;
	j["inputs"] = files(step.inputs);
	j["outputs"] = files(step.outputs);
	j["params"] = step.params;
	return j.dump();
}

void append_step_record(const std::filesystem::path& manifest, const StepRecord& step)
{
	const std::string line = format_step_record(step);
	std::ofstream out(manifest, std::ios::binary | std::ios::app);
	if (!out)
		throw IoError("cannot append to manifest '" + manifest.string() + "'");
	out << line << '\n';
}

} // namespace floodrisk
