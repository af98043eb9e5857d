#include "rbelast/archive.hpp"

#include "rbelast/config.hpp"
#include "rbelast/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace rbe {

namespace {

constexpr const char* kMagic = "RBELAST-ARCHIVE";

template <class T>
T to_little(T v)
{
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

class Writer {
public:
    template <class T>
    void put(T v)
    {
        v = to_little(v);
        buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void size(std::size_t n) { put<std::uint64_t>(n); }
    void vec(const std::vector<double>& v)
    {
        size(v.size());
        for (double x : v)
            put(x);
    }
    void vec(const Eigen::VectorXd& v)
    {
        size(static_cast<std::size_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            put(v[i]);
    }
    void mat(const Eigen::MatrixXd& m)
    {
        size(static_cast<std::size_t>(m.rows()));
        size(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                put(m(i, j));
    }
    void ints(const std::vector<int>& v)
    {
        size(v.size());
        for (int x : v)
            put<std::int32_t>(x);
    }
    void str(const std::string& s)
    {
        size(s.size());
        buf_ += s;
    }
    template <class T>
    void list(const std::vector<T>& items)
    {
        size(items.size());
        for (const auto& x : items) {
            if constexpr (std::is_same_v<T, Eigen::MatrixXd>)
                mat(x);
            else
                vec(x);
        }
    }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(const std::string& b) : buf_(b) {}

    template <class T>
    T get()
    {
        if (pos_ + sizeof(T) > buf_.size())
            throw ArchiveError("payload is truncated");
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return to_little(v);
    }
    std::size_t size()
    {
        const auto n = get<std::uint64_t>();
        if (n > buf_.size())
            throw ArchiveError("implausible record length");
        return static_cast<std::size_t>(n);
    }
    std::vector<double> stdvec()
    {
        std::vector<double> v(size());
        for (auto& x : v)
            x = get<double>();
        return v;
    }
    Eigen::VectorXd vec()
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = get<double>();
        return v;
    }
    Eigen::MatrixXd mat()
    {
        const auto r = size(), c = size();
        Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = get<double>();
        return m;
    }
    std::vector<int> ints()
    {
        std::vector<int> v(size());
        for (auto& x : v)
            x = get<std::int32_t>();
        return v;
    }
    std::string str()
    {
        const auto n = size();
        if (pos_ + n > buf_.size())
            throw ArchiveError("payload is truncated");
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::vector<Eigen::MatrixXd> mats()
    {
        std::vector<Eigen::MatrixXd> v(size());
        for (auto& m : v)
            m = mat();
        return v;
    }
    std::vector<Eigen::VectorXd> vecs()
    {
        std::vector<Eigen::VectorXd> v(size());
        for (auto& x : v)
            x = vec();
        return v;
    }
    bool done() const { return pos_ == buf_.size(); }

private:
    const std::string& buf_;
    std::size_t pos_ = 0;
};

void put_box(Writer& w, const ParamBox& b)
{
    w.vec(b.lo);
    w.vec(b.hi);
}

ParamBox get_box(Reader& r)
{
    ParamBox b;
    b.lo = r.stdvec();
    b.hi = r.stdvec();
    return b;
}

void put_basis(Writer& w, const ReducedBasis& b)
{
    w.mat(b.Z);
    w.size(b.snapshot_params.size());
    for (const auto& mu : b.snapshot_params)
        w.vec(mu);
}

ReducedBasis get_basis(Reader& r)
{
    ReducedBasis b;
    b.Z = r.mat();
    b.snapshot_params.resize(r.size());
    for (auto& mu : b.snapshot_params)
        mu = r.stdvec();
    return b;
}

void put_residual(Writer& w, const ResidualFactor& f)
{
    w.put<std::int32_t>(f.Qf);
    w.put<std::int32_t>(f.Qa);
    w.put<std::int32_t>(f.N);
    w.mat(f.G);
    w.mat(f.R);
    w.ints(f.rank_at);
}

ResidualFactor get_residual(Reader& r)
{
    ResidualFactor f;
    f.Qf = r.get<std::int32_t>();
    f.Qa = r.get<std::int32_t>();
    f.N = r.get<std::int32_t>();
    f.G = r.mat();
    f.R = r.mat();
    f.rank_at = r.ints();
    return f;
}

std::string payload(const RBModel& m)
{
    Writer w;
    w.str(m.problem);
    w.put<std::uint64_t>(m.config_hash);
    w.str(m.config_text);
    w.put<std::uint8_t>(m.compliant ? 1 : 0);
    w.put<std::uint8_t>(m.stagnated ? 1 : 0);
    w.vec(m.mu_bar);

    const auto& th = m.theta;
    put_box(w, th.box());
    w.put<std::int32_t>(th.Qa());
    w.put<std::int32_t>(th.Qf());
    w.put<std::int32_t>(th.Ql());
    w.size(th.tape().code().size());
    for (const auto& in : th.tape().code()) {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(in.op));
        w.put<std::int32_t>(in.a);
        w.put<std::int32_t>(in.b);
        w.put<std::int32_t>(in.index);
        w.put<double>(in.value);
    }
    w.ints(std::vector<int>(th.tape().outputs().begin(), th.tape().outputs().end()));

    put_basis(w, m.basis_pr);
    put_basis(w, m.basis_du);

    const auto& red = m.red;
    w.put<std::uint8_t>(red.compliant ? 1 : 0);
    w.put<std::int32_t>(red.N);
    w.list(red.Kpp);
    w.list(red.Fp);
    w.list(red.Lp);
    w.list(red.Kdd);
    w.list(red.Kdp);
    w.list(red.Fd);
    w.list(red.Ld);

    put_residual(w, m.res_pr);
    put_residual(w, m.res_du);

    const auto& s = m.scm;
    w.mat(s.basis);
    w.vec(s.y_min);
    w.vec(s.y_max);
    w.size(s.mu.size());
    for (const auto& mu : s.mu)
        w.vec(mu);
    w.list(s.theta);
    w.vec(s.alpha);
    w.list(s.ystar);
    w.vec(s.max_gap);
    put_box(w, s.box);
    w.put<std::int32_t>(s.M);
    w.put<double>(s.tol);
    w.put<std::int32_t>(s.J_max);

    w.size(m.history.size());
    for (const auto& h : m.history) {
        w.put<std::int32_t>(h.N);
        w.vec(h.mu);
        w.put<double>(h.max_indicator);
    }
    return w.bytes();
}

RBModel parse_payload(const std::string& bytes)
{
    Reader r(bytes);
    RBModel m;
    m.problem = r.str();
    m.config_hash = r.get<std::uint64_t>();
    m.config_text = r.str();
    m.compliant = r.get<std::uint8_t>() != 0;
    m.stagnated = r.get<std::uint8_t>() != 0;
    m.mu_bar = r.stdvec();

    const ParamBox box = get_box(r);
    const int Qa = r.get<std::int32_t>(), Qf = r.get<std::int32_t>(), Ql = r.get<std::int32_t>();
    std::vector<Tape::Instr> code(r.size());
    for (auto& in : code) {
        in.op = static_cast<Expr::Op>(r.get<std::uint8_t>());
        in.a = r.get<std::int32_t>();
        in.b = r.get<std::int32_t>();
        in.index = r.get<std::int32_t>();
        in.value = r.get<double>();
    }
    const auto outs = r.ints();
    m.theta = ThetaEvaluator(Tape::from_parts(std::move(code), std::vector<std::int32_t>(outs.begin(), outs.end())),
                             Qa, Qf, Ql, box);

    m.basis_pr = get_basis(r);
    m.basis_du = get_basis(r);

    auto& red = m.red;
    red.compliant = r.get<std::uint8_t>() != 0;
    red.N = r.get<std::int32_t>();
    red.Kpp = r.mats();
    red.Fp = r.vecs();
    red.Lp = r.vecs();
    red.Kdd = r.mats();
    red.Kdp = r.mats();
    red.Fd = r.vecs();
    red.Ld = r.vecs();

    m.res_pr = get_residual(r);
    m.res_du = get_residual(r);

    auto& s = m.scm;
    s.basis = r.mat();
    s.y_min = r.vec();
    s.y_max = r.vec();
    s.mu.resize(r.size());
    for (auto& mu : s.mu)
        mu = r.stdvec();
    s.theta = r.vecs();
    s.alpha = r.stdvec();
    s.ystar = r.vecs();
    s.max_gap = r.stdvec();
    s.box = get_box(r);
    s.M = r.get<std::int32_t>();
    s.tol = r.get<double>();
    s.J_max = r.get<std::int32_t>();

    m.history.resize(r.size());
    for (auto& h : m.history) {
        h.N = r.get<std::int32_t>();
        h.mu = r.stdvec();
        h.max_indicator = r.get<double>();
    }
    if (!r.done())
        throw ArchiveError("trailing bytes after payload");
    if (static_cast<int>(red.Kpp.size()) != Qa || m.res_pr.Qa != Qa || m.scm.alpha.size() != m.scm.mu.size() ||
        m.scm.basis.rows() != Qa || m.scm.y_min.size() != m.scm.R())
        throw ArchiveError("inconsistent block counts");
    return m;
}

std::string hex(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

} // namespace

void save_model(const RBModel& model, std::ostream& out)
{
    const std::string body = payload(model);
    out << kMagic << ' ' << kArchiveVersion << '\n'
        << "problem=" << model.problem << '\n'
        << "config_hash=" << hex(model.config_hash) << '\n'
        << "compliant=" << (model.compliant ? 1 : 0) << '\n'
        << "N_max=" << model.N_max() << '\n'
        << "Qa=" << model.theta.Qa() << '\n'
        << "Qf=" << model.theta.Qf() << '\n'
        << "Ql=" << model.theta.Ql() << '\n'
        << "scm_J=" << model.scm.J() << '\n'
        << "payload_bytes=" << body.size() << '\n'
        << "payload_fnv1a=" << hex(fnv1a(body)) << '\n'
        << "end\n";
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out)
        throw ArchiveError("write failed");
}

void save_model(const RBModel& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ArchiveError("cannot open " + path + " for writing");
    save_model(model, out);
}

RBModel load_model(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ArchiveError("empty archive");
    std::istringstream head(line);
    std::string magic;
    std::uint32_t version = 0;
    head >> magic >> version;
    if (magic != kMagic)
        throw ArchiveError("not a model archive");
    if (version != kArchiveVersion)
        throw ArchiveError("archive version " + std::to_string(version) + ", expected " +
                           std::to_string(kArchiveVersion));
    std::map<std::string, std::string> manifest;
    while (std::getline(in, line) && line != "end") {
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArchiveError("bad manifest line '" + line + "'");
        manifest[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (line != "end" || !manifest.count("payload_bytes") || !manifest.count("payload_fnv1a"))
        throw ArchiveError("incomplete manifest");
    const auto n = std::stoull(manifest["payload_bytes"]);
    std::string body(n, '\0');
    in.read(body.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::uint64_t>(in.gcount()) != n)
        throw ArchiveError("payload is truncated");
    if (hex(fnv1a(body)) != manifest["payload_fnv1a"])
        throw ArchiveError("payload checksum mismatch");
    return parse_payload(body);
}

RBModel load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ArchiveError("cannot open " + path);
    return load_model(in);
}

} // namespace rbe
