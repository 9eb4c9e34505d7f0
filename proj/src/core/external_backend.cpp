#include "core/backends.hpp"
#include "core/errors.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace ctiler {

std::string tile_id(const TileRef& ref) {
    return "L" + std::to_string(ref.level) + "_R" + std::to_string(ref.row) + "_C" +
           std::to_string(ref.col);
}

namespace {

std::atomic<uint64_t> g_batch_counter{0};

std::filesystem::path make_batch_dir(const std::filesystem::path& work_dir) {
    const auto dir = work_dir / ("batch_" + std::to_string(::getpid()) + "_" +
                                 std::to_string(g_batch_counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

void run_command(const std::vector<std::string>& argv) {
    if (argv.empty()) throw BackendError("external backend has no command configured");
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw BackendError("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        ::execvp(cargv[0], cargv.data());
        std::fprintf(stderr, "execvp %s: %s\n", cargv[0], std::strerror(errno));
        ::_exit(127);
    }
    int status = 0;
    if (::waitpid(pid, &status, 0) < 0) {
        throw BackendError("waitpid failed: " + std::string(std::strerror(errno)));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::ostringstream msg;
        msg << "external backend command '" << argv[0] << "' ";
        if (WIFEXITED(status)) {
            msg << "exited with status " << WEXITSTATUS(status);
        } else if (WIFSIGNALED(status)) {
            msg << "was killed by signal " << WTERMSIG(status);
        } else {
            msg << "did not exit normally";
        }
        throw BackendError(msg.str());
    }
}

struct Batch {
    std::filesystem::path dir;
    std::filesystem::path manifest;
    std::filesystem::path response;

    ~Batch() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
};

Batch write_batch(const std::filesystem::path& work_dir, const std::vector<Raster>& tiles,
                  const std::vector<TileRef>& refs) {
    Batch batch;
    batch.dir = make_batch_dir(work_dir);
    batch.manifest = batch.dir / "manifest.txt";
    batch.response = batch.dir / "response.txt";

    std::ofstream manifest(batch.manifest, std::ios::trunc);
    if (!manifest) throw BackendError("cannot write manifest: " + batch.manifest.string());
    for (size_t i = 0; i < tiles.size(); ++i) {
        const auto png = batch.dir / (tile_id(refs[i]) + ".png");
        save_png(png, tiles[i]);
        manifest << tile_id(refs[i]) << '\t' << png.string() << '\n';
    }
    manifest.close();
    return batch;
}

/// Response lines keyed by tile id; each line's remaining fields returned raw.
std::map<std::string, std::vector<std::string>> parse_response(
    const std::filesystem::path& path, size_t expected_fields) {
    std::ifstream in(path);
    if (!in) throw BackendError("external backend produced no response file: " + path.string());
    std::map<std::string, std::vector<std::string>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, '\t')) fields.push_back(field);
        if (fields.size() != expected_fields) {
            throw BackendError("malformed response line " + std::to_string(lineno) + " ('" +
                               line + "') in " + path.string());
        }
        std::vector<std::string> rest(fields.begin() + 1, fields.end());
        rows[fields[0]] = std::move(rest);
    }
    return rows;
}

} // namespace

ExternalClassifier::ExternalClassifier(std::vector<std::string> argv,
                                       std::filesystem::path work_dir, double tau)
    : argv_(std::move(argv)), work_dir_(std::move(work_dir)), tau_(tau) {
    if (argv_.empty()) throw std::invalid_argument("external classifier needs a command");
}

Verdict ExternalClassifier::classify(const Raster& tile, const TileRef& ref) const {
    return classify_batch({tile}, {ref})[0];
}

std::vector<Verdict> ExternalClassifier::classify_batch(const std::vector<Raster>& tiles,
                                                        const std::vector<TileRef>& refs) const {
    Batch batch = write_batch(work_dir_, tiles, refs);
    std::vector<std::string> argv = argv_;
    argv.push_back(batch.manifest.string());
    argv.push_back(batch.response.string());
    run_command(argv);

    auto rows = parse_response(batch.response, 3);
    std::vector<Verdict> out(refs.size());
    for (size_t i = 0; i < refs.size(); ++i) {
        const auto id = tile_id(refs[i]);
        auto it = rows.find(id);
        if (it == rows.end()) {
            throw BackendError("external classifier response is missing tile " + id);
        }
        const auto& fields = it->second;
        if (fields[0] != "0" && fields[0] != "1") {
            throw BackendError("external classifier label for tile " + id +
                               " must be 0 or 1, got '" + fields[0] + "'");
        }
        double confidence;
        try {
            confidence = std::stod(fields[1]);
        } catch (const std::exception&) {
            throw BackendError("external classifier confidence for tile " + id +
                               " is not a number: '" + fields[1] + "'");
        }
        if (confidence < 0.0 || confidence > 1.0) {
            throw BackendError("external classifier confidence for tile " + id +
                               " is outside [0, 1]");
        }
        // The label column is validated for protocol conformance; the verdict
        // itself comes from thresholding the confidence at the level's tau.
        out[i] = make_verdict(confidence, tau_);
    }
    return out;
}

ExternalSegmenter::ExternalSegmenter(std::vector<std::string> argv,
                                     std::filesystem::path work_dir)
    : argv_(std::move(argv)), work_dir_(std::move(work_dir)) {
    if (argv_.empty()) throw std::invalid_argument("external segmenter needs a command");
}

BinaryMask ExternalSegmenter::segment(const Raster& tile, const TileRef& ref) const {
    return segment_batch({tile}, {ref})[0];
}

std::vector<BinaryMask> ExternalSegmenter::segment_batch(const std::vector<Raster>& tiles,
                                                         const std::vector<TileRef>& refs) const {
    Batch batch = write_batch(work_dir_, tiles, refs);
    std::vector<std::string> argv = argv_;
    argv.push_back(batch.manifest.string());
    argv.push_back(batch.response.string());
    run_command(argv);

    auto rows = parse_response(batch.response, 2);
    std::vector<BinaryMask> out(refs.size());
    for (size_t i = 0; i < refs.size(); ++i) {
        const auto id = tile_id(refs[i]);
        auto it = rows.find(id);
        if (it == rows.end()) {
            throw BackendError("external segmenter response is missing tile " + id);
        }
        BinaryMask mask = load_mask_png(it->second[0]);
        if (mask.width != tiles[i].width || mask.height != tiles[i].height) {
            throw BackendError("external segmenter mask for tile " + id +
                               " has wrong dimensions");
        }
        out[i] = std::move(mask);
    }
    return out;
}

} // namespace ctiler
