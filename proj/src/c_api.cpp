#include "grag/grag_c.h"

#include <cstring>
#include <new>
#include <string>

#include "grag/config.hpp"
#include "grag/driver.hpp"
#include "grag/util.hpp"

struct grag_session {
    grag::config::RunConfig config;
    std::string last_error;
};

namespace {

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(::operator new(text.size() + 1, std::nothrow));
    if (!out) {
        return nullptr;
    }
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

grag_status status_of(const grag::Error& error) {
    using Kind = grag::Error::Kind;
    switch (error.kind()) {
        case Kind::invalid_argument: return GRAG_ERR_INVALID_ARGUMENT;
        case Kind::io: return GRAG_ERR_IO;
        case Kind::parse: return GRAG_ERR_PARSE;
        case Kind::validation: return GRAG_ERR_VALIDATION;
        case Kind::backend: return GRAG_ERR_BACKEND;
        case Kind::not_found: return GRAG_ERR_NOT_FOUND;
        case Kind::internal: return GRAG_ERR_INTERNAL;
    }
    return GRAG_ERR_INTERNAL;
}

template <typename Fn>
grag_status guarded(grag_session* session, char** out_text, Fn&& fn) {
    if (!session) {
        return GRAG_ERR_INVALID_ARGUMENT;
    }
    session->last_error.clear();
    try {
        std::string result = fn();
        if (out_text) {
            *out_text = dup_string(result);
        }
        return GRAG_OK;
    } catch (const grag::Error& error) {
        session->last_error = error.what();
        return status_of(error);
    } catch (const std::exception& error) {
        session->last_error = error.what();
        return GRAG_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* grag_version(void) {
    static const std::string version = grag::driver::version();
    return version.c_str();
}

grag_status grag_session_create(const char* config_json, grag_session** out_session,
                                char** out_error) {
    if (!out_session) {
        return GRAG_ERR_INVALID_ARGUMENT;
    }
    *out_session = nullptr;
    try {
        auto session = std::make_unique<grag_session>();
        session->config =
            grag::config::config_from_json(config_json && *config_json ? config_json : "{}");
        *out_session = session.release();
        return GRAG_OK;
    } catch (const grag::Error& error) {
        if (out_error) {
            *out_error = dup_string(error.what());
        }
        return status_of(error);
    } catch (const std::exception& error) {
        if (out_error) {
            *out_error = dup_string(error.what());
        }
        return GRAG_ERR_PARSE;
    }
}

void grag_session_destroy(grag_session* session) {
    delete session;
}

const char* grag_last_error(const grag_session* session) {
    return session ? session->last_error.c_str() : "";
}

grag_status grag_ingest(grag_session* session, const char* upstream_path, const char* task,
                        const char* out_path, char** out_summary) {
    return guarded(session, out_summary, [&] {
        if (!upstream_path || !task || !out_path) {
            throw grag::Error(grag::Error::Kind::invalid_argument,
                              "upstream path, task, and output path are required");
        }
        return grag::driver::ingest(upstream_path, grag::corpus::task_from_string(task), out_path);
    });
}

grag_status grag_run(grag_session* session, const char* out_dir, char** out_manifest) {
    return guarded(session, out_manifest, [&] {
        if (!out_dir || !*out_dir) {
            throw grag::Error(grag::Error::Kind::invalid_argument, "output directory is required");
        }
        return grag::driver::run(session->config, out_dir);
    });
}

grag_status grag_report(grag_session* session, const char* run_dir, const char* format,
                        char** out_text) {
    return guarded(session, out_text, [&] {
        if (!run_dir) {
            throw grag::Error(grag::Error::Kind::invalid_argument, "run directory is required");
        }
        return grag::driver::report(run_dir, format ? format : "table");
    });
}

grag_status grag_inspect(grag_session* session, const char* run_dir, const char* case_id,
                         char** out_text) {
    return guarded(session, out_text, [&] {
        if (!run_dir || !case_id) {
            throw grag::Error(grag::Error::Kind::invalid_argument,
                              "run directory and case id are required");
        }
        return grag::driver::inspect(run_dir, case_id);
    });
}

grag_status grag_cache_purge(grag_session* session, const char* cache_dir, char** out_summary) {
    return guarded(session, out_summary, [&] {
        const std::string dir =
            cache_dir && *cache_dir ? cache_dir : session->config.cache_dir;
        if (dir.empty()) {
            throw grag::Error(grag::Error::Kind::invalid_argument, "no cache directory configured");
        }
        return grag::driver::cache_purge(dir);
    });
}

void grag_string_free(char* text) {
    ::operator delete(text);
}

}  // extern "C"
