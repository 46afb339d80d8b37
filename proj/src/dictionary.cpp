#include "extentlab/dictionary.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace extentlab
{

namespace
{

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t quantize(double v)
{
    return static_cast<std::int64_t>(std::llround(v / kRayTolerance));
}

template <typename A, typename B>
bool amplitudes_match(const A &a, const B &b)
{
    return (a - b).cwiseAbs().maxCoeff() <= kRayTolerance;
}

void check_unit_norm(const ComplexVector &v)
{
    const double norm = v.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance)
    {
        std::ostringstream msg;
        msg.precision(17);
        msg << "word is not unit norm (norm = " << norm << ")";
        throw NormalizationError(msg.str());
    }
}

const nlohmann::json &require(const nlohmann::json &obj, const char *key)
{
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError(std::string("missing field \"") + key + "\"");
    return obj.at(key);
}

ComplexVector amps_from_json(const nlohmann::json &amps)
{
    if (!amps.is_array())
        throw ParseError("\"amps\" must be an array of [re, im] pairs");
    ComplexVector v(static_cast<Index>(amps.size()));
    for (std::size_t j = 0; j < amps.size(); ++j)
    {
        const auto &pair = amps[j];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ParseError("amplitude " + std::to_string(j) + " is not a [re, im] pair");
        v(static_cast<Index>(j)) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    return v;
}

template <typename Derived>
nlohmann::json amps_to_json(const Eigen::MatrixBase<Derived> &v)
{
    auto out = nlohmann::json::array();
    for (Index j = 0; j < v.size(); ++j)
        out.push_back({v(j).real(), v(j).imag()});
    return out;
}

nlohmann::json parse_json(const std::string &text)
{
    try
    {
        return nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
}

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::uint64_t RayIndex::key_of(const ComplexVector &canonical)
{
    std::uint64_t h = static_cast<std::uint64_t>(canonical.size());
    for (Index j = 0; j < canonical.size(); ++j)
    {
        h = mix64(h ^ static_cast<std::uint64_t>(quantize(canonical(j).real())));
        h = mix64(h ^ static_cast<std::uint64_t>(quantize(canonical(j).imag())));
    }
    return h;
}

bool Dictionary::has_labels() const
{
    for (const auto &l : labels_)
        if (!l.empty())
            return true;
    return false;
}

std::optional<Index> Dictionary::find(const ComplexVector &v) const
{
    if (v.size() != dimension())
        return std::nullopt;
    const ComplexVector c = canonical_phase(v);
    return index_.find(RayIndex::key_of(c), [&](Index id) { return amplitudes_match(words_.col(id), c); });
}

Index Dictionary::rank(double rel_tol) const
{
    if (size() == 0)
        return 0;
    const Eigen::VectorXd sv = Eigen::BDCSVD<ComplexMatrix>(words_).singularValues();
    const double cutoff = rel_tol * sv(0);
    return static_cast<Index>((sv.array() > cutoff).count());
}

double Dictionary::condition_number() const
{
    if (size() < dimension() || size() == 0)
        return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd sv = Eigen::BDCSVD<ComplexMatrix>(words_).singularValues();
    const double smallest = sv(dimension() - 1);
    return smallest > 0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
}

DictionaryBuilder::DictionaryBuilder(Index dimension, Index expected_size) : dimension_(dimension)
{
    if (dimension < 1)
        throw DimensionError("dictionary dimension must be positive");
    columns_.reserve(static_cast<std::size_t>(expected_size));
    labels_.reserve(static_cast<std::size_t>(expected_size));
}

bool DictionaryBuilder::add(const ComplexVector &v, std::string label)
{
    if (v.size() != dimension_)
        throw DimensionError("word of length " + std::to_string(v.size()) + " in a dictionary over C^" +
                             std::to_string(dimension_));
    check_unit_norm(v);
    return add_canonical(canonical_phase(v), std::move(label));
}

bool DictionaryBuilder::add_canonical(ComplexVector canonical, std::string label)
{
    const std::uint64_t key = RayIndex::key_of(canonical);
    const auto hit = index_.find(
        key, [&](Index id) { return amplitudes_match(columns_[static_cast<std::size_t>(id)], canonical); });
    if (hit)
        return false;
    index_.insert(size(), key);
    columns_.push_back(std::move(canonical));
    labels_.push_back(std::move(label));
    return true;
}

Dictionary DictionaryBuilder::build() &&
{
    Dictionary d;
    d.words_.resize(dimension_, size());
    for (Index i = 0; i < size(); ++i)
        d.words_.col(i) = columns_[static_cast<std::size_t>(i)];
    columns_.clear();
    d.labels_ = std::move(labels_);
    d.index_ = std::move(index_);
    return d;
}

Dictionary make_dictionary(const std::vector<ComplexVector> &vectors, const std::vector<std::string> &labels)
{
    if (vectors.empty())
        throw ValidationError("cannot build a dictionary from an empty word list");
    if (!labels.empty() && labels.size() != vectors.size())
        throw ValidationError("label count does not match word count");
    DictionaryBuilder builder(vectors.front().size(), static_cast<Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i)
        builder.add(vectors[i], labels.empty() ? std::string{} : labels[i]);
    return std::move(builder).build();
}

Dictionary tensor(const Dictionary &d1, const Dictionary &d2)
{
    DictionaryBuilder builder(d1.dimension() * d2.dimension(), d1.size() * d2.size());
    const bool labelled = d1.has_labels() || d2.has_labels();
    for (Index i = 0; i < d1.size(); ++i)
        for (Index j = 0; j < d2.size(); ++j)
            builder.add(kron(d1.word(i), d2.word(j)), labelled ? d1.label(i) + "*" + d2.label(j) : std::string{});
    return std::move(builder).build();
}

Dictionary conjugate(const Dictionary &d)
{
    DictionaryBuilder builder(d.dimension(), d.size());
    for (Index i = 0; i < d.size(); ++i)
        builder.add(d.word(i).conjugate(), d.label(i));
    return std::move(builder).build();
}

bool is_conjugation_closed(const Dictionary &d)
{
    for (Index i = 0; i < d.size(); ++i)
        if (!d.contains(d.word(i).conjugate()))
            return false;
    return true;
}

ComplexVector maximally_entangled(int local_dim, int factors)
{
    if (local_dim < 2 || factors < 1)
        throw ValidationError("maximally entangled state needs local dimension >= 2 and at least one factor");
    constexpr Index kMaxDimension = Index{1} << 24;
    Index half = 1;
    for (int i = 0; i < factors; ++i)
    {
        half *= local_dim;
        if (half * half > kMaxDimension)
            throw CapacityError("maximally entangled state exceeds supported dimension");
    }
    ComplexVector phi = ComplexVector::Zero(half * half);
    const double amp = 1.0 / std::sqrt(static_cast<double>(half));
    for (Index k = 0; k < half; ++k)
        phi(k * half + k) = amp;
    return phi;
}

Dictionary add_word(const Dictionary &d, const ComplexVector &w, std::string label)
{
    if (w.size() != d.dimension())
        throw DimensionError("added word has the wrong dimension");
    check_unit_norm(w);
    DictionaryBuilder builder(d.dimension(), d.size() + 1);
    for (Index i = 0; i < d.size(); ++i)
        builder.add(d.word(i), d.label(i));
    builder.add(w, std::move(label));
    return std::move(builder).build();
}

std::string dictionary_to_json(const Dictionary &d)
{
    nlohmann::json doc;
    doc["version"] = kDictionaryFormatVersion;
    doc["dim"] = d.dimension();
    auto words = nlohmann::json::array();
    for (Index i = 0; i < d.size(); ++i)
    {
        nlohmann::json w;
        if (!d.label(i).empty())
            w["label"] = d.label(i);
        w["amps"] = amps_to_json(d.word(i));
        words.push_back(std::move(w));
    }
    doc["words"] = std::move(words);
    return doc.dump();
}

Dictionary dictionary_from_json(const std::string &text)
{
    const nlohmann::json doc = parse_json(text);
    const auto &version = require(doc, "version");
    if (!version.is_number_integer())
        throw ParseError("\"version\" must be an integer");
    if (version.get<int>() != kDictionaryFormatVersion)
        throw VersionError("unsupported dictionary format version " + version.dump() + " (expected " +
                           std::to_string(kDictionaryFormatVersion) + ")");
    const auto &dim = require(doc, "dim");
    if (!dim.is_number_integer() || dim.get<long long>() < 1)
        throw ParseError("\"dim\" must be a positive integer");
    const auto &words = require(doc, "words");
    if (!words.is_array() || words.empty())
        throw ParseError("\"words\" must be a non-empty array");

    DictionaryBuilder builder(dim.get<Index>(), static_cast<Index>(words.size()));
    for (const auto &w : words)
    {
        ComplexVector amps = amps_from_json(require(w, "amps"));
        std::string label;
        if (w.contains("label"))
        {
            if (!w["label"].is_string())
                throw ParseError("word label must be a string");
            label = w["label"].get<std::string>();
        }
        builder.add(amps, std::move(label));
    }
    return std::move(builder).build();
}

void save_dictionary(const Dictionary &d, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << dictionary_to_json(d) << '\n';
}

Dictionary load_dictionary(const std::filesystem::path &path)
{
    return dictionary_from_json(read_file(path));
}

ComplexVector state_from_json(const std::string &text)
{
    const nlohmann::json doc = parse_json(text);
    ComplexVector psi = amps_from_json(require(doc, "amps"));
    if (psi.size() == 0)
        throw ParseError("state has no amplitudes");
    if (!psi.allFinite())
        throw ParseError("state has non-finite amplitudes");
    return psi;
}

std::string state_to_json(const ComplexVector &psi)
{
    nlohmann::json doc;
    doc["amps"] = amps_to_json(psi);
    return doc.dump();
}

ComplexVector load_state(const std::filesystem::path &path)
{
    return state_from_json(read_file(path));
}

} // namespace extentlab
