// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "env_internal.hpp"

namespace toolgym::detail {

namespace {

FsNode* node_at(FileSystemState& st, const std::vector<std::string>& path) {
    FsNode* n = &st.root;
    for (const auto& c : path) {
        auto it = n->children.find(c);
        if (it == n->children.end() || !it->second.is_dir) return nullptr;
        n = &it->second;
    }
    return n;
}

FsNode* cwd_node(FileSystemState& st) { return node_at(st, st.cwd); }

bool has_slash(const std::string& s) { return s.find('/') != std::string::npos; }

// path-style arguments are rejected for name-only tools
std::optional<ToolResult> reject_path(const Ctx& ctx, const std::string& tool,
                                      const std::string& arg) {
    if (!has_slash(arg)) return std::nullopt;
    return ctx.fail("fs.path-not-allowed", {{"tool", tool}, {"arg", arg}});
}

ToolResult not_found(const Ctx& ctx, const std::string& tool, const std::string& verb,
                     const std::string& name) {
    return ctx.fail("fs.not-found", {{"tool", tool}, {"verb", verb}, {"name", name}});
}

void find_matches(const FsNode& dir, const std::string& reported_prefix,
                  const std::string& needle, json& out) {
    for (const auto& [child_name, child] : dir.children) {
        const std::string reported = reported_prefix + "/" + child_name;
        if (needle.empty() || child_name.find(needle) != std::string::npos)
            out.push_back(reported);
        if (child.is_dir) find_matches(child, reported, needle, out);
    }
}

}  // namespace

std::string abs_path_of(const std::vector<std::string>& parts) {
    if (parts.empty()) return "/";
    std::string out;
    for (const auto& p : parts) out += "/" + p;
    return out;
}

ToolResult fs_execute(FileSystemState& st, const ToolCall& call, const Ctx& ctx) {
    const json& a = call.arguments;
    FsNode* cwd = cwd_node(st);
    if (!cwd) return ctx.fail("fs.not-found", {{"tool", call.name}, {"verb", "access"},
                                               {"name", abs_path_of(st.cwd)}});

    if (call.name == "ls") {
        const bool all = a.value("a", false);
        json names = json::array();
        for (const auto& [n, node] : cwd->children) {
            (void)node;
            if (!all && !n.empty() && n[0] == '.') continue;
            names.push_back(n);
        }
        return ok_result({{"current_directory_content", names}});
    }

    if (call.name == "cd") {
        const std::string folder = a.at("folder").get<std::string>();
        if (folder != ".." && folder != ".") {
            if (auto r = reject_path(ctx, "cd", folder)) return *r;
        }
        if (folder == "..") {
            if (!st.cwd.empty()) st.cwd.pop_back();
            return ok_result({{"current_working_directory", abs_path_of(st.cwd)}});
        }
        if (folder == ".")
            return ok_result({{"current_working_directory", abs_path_of(st.cwd)}});
        auto it = cwd->children.find(folder);
        if (it == cwd->children.end()) return not_found(ctx, "cd", "access", folder);
        if (!it->second.is_dir)
            return ctx.fail("fs.not-a-directory", {{"tool", "cd"}, {"name", folder}});
        st.cwd.push_back(folder);
        return ok_result({{"current_working_directory", abs_path_of(st.cwd)}});
    }

    if (call.name == "find") {
        const std::string path = a.value("path", ".");
        const std::string needle = a.value("name", "");
        std::vector<std::string> start = st.cwd;
        if (path != ".") {
            std::vector<std::string> parts;
            std::stringstream ss(path);
            std::string part;
            bool absolute = !path.empty() && path[0] == '/';
            while (std::getline(ss, part, '/'))
                if (!part.empty() && part != ".") parts.push_back(part);
            start = absolute ? parts : st.cwd;
            if (!absolute) start.insert(start.end(), parts.begin(), parts.end());
        }
        FsNode* base = node_at(st, start);
        if (!base) return not_found(ctx, "find", "access", path);
        // Reported paths repeat the base directory's own name once more after
        // its absolute path; kept for compatibility with the reference traces.
        std::string prefix;
        if (!start.empty()) prefix = abs_path_of(start) + "/" + start.back();
        json matches = json::array();
        find_matches(*base, prefix, needle, matches);
        return ok_result({{"matches", matches}});
    }

    if (call.name == "grep") {
        const std::string file = a.at("file_name").get<std::string>();
        const std::string pattern = a.at("pattern").get<std::string>();
        if (auto r = reject_path(ctx, "grep", file)) return *r;
        auto it = cwd->children.find(file);
        if (it == cwd->children.end()) return not_found(ctx, "grep", "access", file);
        if (it->second.is_dir)
            return ctx.fail("fs.is-directory", {{"tool", "grep"}, {"name", file}});
        json lines = json::array();
        std::stringstream ss(it->second.content);
        std::string line;
        while (std::getline(ss, line))
            if (line.find(pattern) != std::string::npos) lines.push_back(line);
        return ok_result({{"matching_lines", lines}});
    }

    if (call.name == "rm") {
        const std::string name = a.at("file_name").get<std::string>();
        if (auto r = reject_path(ctx, "rm", name)) return *r;
        auto it = cwd->children.find(name);
        if (it == cwd->children.end()) return not_found(ctx, "rm", "remove", name);
        if (it->second.is_dir && !it->second.children.empty())
            return ctx.fail("fs.dir-not-empty", {{"tool", "rm"}, {"name", name}});
        cwd->children.erase(it);
        return ok_result({{"result", "'" + name + "' removed."}});
    }

    if (call.name == "rmdir") {
        const std::string name = a.at("dir_name").get<std::string>();
        if (auto r = reject_path(ctx, "rmdir", name)) return *r;
        auto it = cwd->children.find(name);
        if (it == cwd->children.end()) return not_found(ctx, "rmdir", "remove", name);
        if (!it->second.is_dir)
            return ctx.fail("fs.not-a-directory", {{"tool", "rmdir"}, {"name", name}});
        if (!it->second.children.empty())
            return ctx.fail("fs.dir-not-empty", {{"tool", "rmdir"}, {"name", name}});
        cwd->children.erase(it);
        return ok_result({{"result", "'" + name + "' removed."}});
    }

    if (call.name == "cp" || call.name == "mv") {
        const bool is_cp = call.name == "cp";
        const char* verb = is_cp ? "copy" : "move";
        const char* done = is_cp ? "copied" : "moved";
        const std::string src = a.at("source").get<std::string>();
        const std::string dst = a.at("destination").get<std::string>();
        if (auto r = reject_path(ctx, call.name, src)) return *r;
        if (auto r = reject_path(ctx, call.name, dst)) return *r;
        auto sit = cwd->children.find(src);
        if (sit == cwd->children.end()) return not_found(ctx, call.name, verb, src);
        auto dit = cwd->children.find(dst);
        if (dit != cwd->children.end() && dit->second.is_dir) {
            // copy/move into an existing directory under the same name
            FsNode moved = sit->second;
            dit->second.children[src] = std::move(moved);
            if (!is_cp) cwd->children.erase(src);
        } else if (dit != cwd->children.end()) {
            return ctx.fail("fs.exists", {{"tool", call.name}, {"name", dst}});
        } else {
            FsNode copy = sit->second;
            cwd->children[dst] = std::move(copy);
            if (!is_cp) cwd->children.erase(src);
        }
        return ok_result({{"result", "'" + src + "' " + done + " to '" + dst + "'"}});
    }

    return ctx.fail("unknown-tool", {{"fn", call.name}});
}

json fs_to_json_node(const FsNode& n) {
    if (!n.is_dir) return json(n.content);
    json obj = json::object();
    for (const auto& [name, child] : n.children) obj[name] = fs_to_json_node(child);
    return obj;
}

json fs_to_json(const FileSystemState& st) {
    return {{"root", fs_to_json_node(st.root)}, {"cwd", abs_path_of(st.cwd)}};
}

static FsNode fs_node_from_json(const json& j) {
    FsNode n;
    if (j.is_string()) {
        n.is_dir = false;
        n.content = j.get<std::string>();
        return n;
    }
    if (!j.is_object()) throw std::runtime_error("filesystem node must be object or string");
    n.is_dir = true;
    for (auto it = j.begin(); it != j.end(); ++it)
        n.children[it.key()] = fs_node_from_json(it.value());
    return n;
}

FileSystemState fs_from_json(const json& j) {
    FileSystemState st;
    st.root = fs_node_from_json(j.value("root", json::object()));
    st.root.is_dir = true;
    const std::string cwd = j.value("cwd", "/");
    std::stringstream ss(cwd);
    std::string part;
    while (std::getline(ss, part, '/'))
        if (!part.empty()) st.cwd.push_back(part);
    return st;
}

}  // namespace toolgym::detail

namespace toolgym {

std::string fs_abs_path(const FileSystemState& fs) { return detail::abs_path_of(fs.cwd); }

}  // namespace toolgym
