#include "epps/config.hpp"

#include <fstream>
#include <set>

namespace epps
{

namespace
{

using nlohmann::json;

void reject_unknown(const json &obj, const std::string &where, std::initializer_list<const char *> allowed)
{
    if (!obj.is_object())
        throw InputError("config field '" + where + "' must be an object");
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto &item : obj.items())
        if (!known.count(item.key()))
            throw InputError("unknown config field '" + (where.empty() ? "" : where + ".") + item.key() + "'");
}

template <class T>
void read(const json &obj, const char *key, const std::string &path, T &out)
{
    if (!obj.contains(key))
        return;
    try
    {
        out = obj.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw InputError("config field '" + path + "' has the wrong type");
    }
}

Matrix read_correlation(const json &value, std::size_t assets)
{
    const auto m = static_cast<Eigen::Index>(assets);
    if (value.is_number())
    {
        Matrix r = Matrix::Constant(m, m, value.get<double>());
        r.diagonal().setOnes();
        return r;
    }
    if (!value.is_array() || value.size() != assets)
        throw InputError("config field 'rho' must be a number or an m x m array");
    Matrix r(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const auto &row = value[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != assets)
            throw InputError("config field 'rho' must be a number or an m x m array");
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (!row[static_cast<std::size_t>(j)].is_number())
                throw InputError("config field 'rho' has the wrong type");
            r(i, j) = row[static_cast<std::size_t>(j)].get<double>();
        }
    }
    if (!r.isApprox(r.transpose(), 0.0))
        throw InputError("config field 'rho' must be symmetric");
    return r;
}

} // namespace

SimConfig sim_config_from_json(const json &doc)
{
    reject_unknown(doc, "",
                   {"model", "n_steps", "dt", "seed", "start_price", "mu", "sigma2", "rho", "merton", "vg", "garch", "ou"});

    std::string model_name = "gbm";
    read(doc, "model", "model", model_name);
    SimConfig c = default_config(model_from_string(model_name));

    read(doc, "n_steps", "n_steps", c.n_steps);
    read(doc, "dt", "dt", c.dt);
    read(doc, "seed", "seed", c.seed);
    read(doc, "start_price", "start_price", c.start_price);
    read(doc, "mu", "mu", c.mu);
    read(doc, "sigma2", "sigma2", c.sigma2);
    if (c.correlation.rows() != static_cast<Eigen::Index>(c.assets()))
        c.correlation = Matrix::Identity(static_cast<Eigen::Index>(c.assets()), static_cast<Eigen::Index>(c.assets()));
    if (doc.contains("rho"))
        c.correlation = read_correlation(doc.at("rho"), c.assets());

    if (doc.contains("merton"))
    {
        const auto &b = doc.at("merton");
        reject_unknown(b, "merton", {"lambda", "a", "b"});
        read(b, "lambda", "merton.lambda", c.merton.lambda);
        read(b, "a", "merton.a", c.merton.a);
        read(b, "b", "merton.b", c.merton.b);
    }
    if (doc.contains("vg"))
    {
        const auto &b = doc.at("vg");
        reject_unknown(b, "vg", {"beta", "subordinator"});
        read(b, "beta", "vg.beta", c.vg.beta);
        std::string sub = to_string(c.vg.subordinator);
        read(b, "subordinator", "vg.subordinator", sub);
        c.vg.subordinator = subordinator_from_string(sub);
    }
    if (doc.contains("garch"))
    {
        const auto &b = doc.at("garch");
        reject_unknown(b, "garch", {"theta", "w", "lambda", "start_variance", "variant"});
        read(b, "theta", "garch.theta", c.garch.theta);
        read(b, "w", "garch.w", c.garch.w);
        read(b, "lambda", "garch.lambda", c.garch.lambda);
        read(b, "start_variance", "garch.start_variance", c.garch.start_variance);
        std::string variant = to_string(c.garch.variant);
        read(b, "variant", "garch.variant", variant);
        c.garch.variant = garch_variant_from_string(variant);
    }
    if (doc.contains("ou"))
    {
        const auto &b = doc.at("ou");
        reject_unknown(b, "ou", {"theta", "long_term_price"});
        read(b, "theta", "ou.theta", c.ou.theta);
        read(b, "long_term_price", "ou.long_term_price", c.ou.long_term_price);
    }
    c.validate();
    return c;
}

json to_json(const SimConfig &c)
{
    json rho = json::array();
    for (Eigen::Index i = 0; i < c.correlation.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < c.correlation.cols(); ++j)
            row.push_back(c.correlation(i, j));
        rho.push_back(row);
    }
    json doc = {{"model", to_string(c.model)},
                {"n_steps", c.n_steps},
                {"dt", c.dt},
                {"seed", c.seed},
                {"start_price", c.start_price},
                {"mu", c.mu},
                {"sigma2", c.sigma2},
                {"rho", rho}};
    switch (c.model)
    {
    case Model::merton:
        doc["merton"] = {{"lambda", c.merton.lambda}, {"a", c.merton.a}, {"b", c.merton.b}};
        break;
    case Model::variance_gamma:
        doc["vg"] = {{"beta", c.vg.beta}, {"subordinator", to_string(c.vg.subordinator)}};
        break;
    case Model::garch:
        doc["garch"] = {{"theta", c.garch.theta},
                        {"w", c.garch.w},
                        {"lambda", c.garch.lambda},
                        {"start_variance", c.garch.start_variance},
                        {"variant", to_string(c.garch.variant)}};
        break;
    case Model::ou:
        doc["ou"] = {{"theta", c.ou.theta}, {"long_term_price", c.ou.long_term_price}};
        break;
    case Model::gbm:
        break;
    }
    return doc;
}

json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open config file '" + path + "'");
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error &e)
    {
        throw InputError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace epps
