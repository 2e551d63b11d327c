"""Config loading and validation."""

import pytest

from datapricer.config import (
    ConfigError,
    build_instance,
    load_config,
    parse_config,
    resolve_epsilon,
)

GOOD = {
    "schema": 1,
    "instance": {
        "n_total": 10,
        "valuations": {
            "family": "power_law",
            "specs": [
                {"alpha": 0.9, "beta": 0.4, "gamma": 0.5},
                {"alpha": 0.7, "beta": 0.4, "gamma": 0.5},
            ],
        },
    },
    "space": {"scheme": "monotone", "epsilon": 0.3},
    "setting": {"kind": "stochastic", "weights": [0.5, 0.5]},
    "run": {"horizon": 100, "seeds": [0, 1]},
}


def _variant(**overrides):
    import copy

    raw = copy.deepcopy(GOOD)
    for path, value in overrides.items():
        node = raw
        parts = path.split(".")
        for key in parts[:-1]:
            node = node[key]
        if value is ...:
            del node[parts[-1]]
        else:
            node[parts[-1]] = value
    return raw


def test_good_config_parses():
    cfg = parse_config(GOOD)
    assert cfg.instance.n_total == 10
    assert cfg.run.horizons == (100,)
    assert cfg.setting.weights == (0.5, 0.5)
    inst = build_instance(cfg)
    assert inst.m == 2
    assert inst.smoothness is not None and inst.diminishing is not None


def test_schema_version_guard():
    with pytest.raises(ConfigError, match="schema"):
        parse_config(_variant(schema=2))
    with pytest.raises(ConfigError, match="schema"):
        parse_config(_variant(schema=...))


@pytest.mark.parametrize(
    "path, value, hint",
    [
        ("instance.n_total", 0, "instance.n_total"),
        ("instance.valuations.family", "mystery", "family"),
        ("space.scheme", "linear", "space.scheme"),
        ("space.epsilon", 1.5, "space.epsilon"),
        ("setting.weights", [0.7, 0.7], "setting.weights"),
        ("setting.weights", [1.0], "setting.weights"),
        ("run.seeds", [], "run.seeds"),
        ("run.horizon", -1, "run.horizons"),
    ],
)
def test_invalid_configs_name_the_key(path, value, hint):
    with pytest.raises(ConfigError, match=hint.replace(".", r"\.")):
        parse_config(_variant(**{path: value}))


def test_missing_run_section():
    with pytest.raises(ConfigError, match="run"):
        parse_config(_variant(run=...))


def test_explicit_family_length_checked():
    raw = _variant(
        **{
            "instance.valuations": {
                "family": "explicit",
                "values": [[0.0, 0.5]],  # wrong length for n_total=10
            }
        }
    )
    with pytest.raises(ConfigError, match=r"values\[0\]"):
        parse_config(raw)


def test_measured_constants_resolved_from_curves():
    cfg = parse_config(GOOD)
    inst = build_instance(cfg)
    from datapricer.valuations import measure_instance_constants

    l_hat, j_hat = measure_instance_constants(inst.valuations)
    assert inst.smoothness == l_hat
    assert inst.diminishing == j_hat


def test_explicit_constants_pass_through():
    raw = _variant(**{"instance.smoothness": 0.9, "instance.diminishing": 0.2})
    inst = build_instance(parse_config(raw))
    assert inst.smoothness == 0.9
    assert inst.diminishing == 0.2


def test_auto_epsilon_schedule():
    raw = _variant(**{"space.epsilon": "auto", "space.auto_coeff": 10.0})
    cfg = parse_config(raw)
    assert resolve_epsilon(cfg, 10000) == pytest.approx(0.1)
    assert resolve_epsilon(cfg, 1) == 0.95  # capped below 1
    fixed = parse_config(GOOD)
    assert resolve_epsilon(fixed, 10**6) == 0.3


def test_adversarial_setting():
    raw = _variant(
        setting={"kind": "adversarial", "sequence": {"kind": "blocks", "k": 4}, "theta": 0.05}
    )
    cfg = parse_config(raw)
    assert cfg.setting.theta == 0.05
    raw2 = _variant(setting={"kind": "adversarial", "sequence": {"kind": "blocks"}})
    assert parse_config(raw2).setting.theta is None
    with pytest.raises(ConfigError, match="theta"):
        parse_config(
            _variant(setting={"kind": "adversarial", "sequence": {"kind": "blocks"}, "theta": -1})
        )


def test_load_config_yaml_roundtrip(tmp_path):
    import yaml

    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump(GOOD))
    cfg = load_config(path)
    assert cfg.echo()["instance"]["n_total"] == 10


def test_load_config_reports_yaml_errors(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("schema: 1\ninstance: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_random_monotone_family():
    raw = _variant(
        **{
            "instance.valuations": {
                "family": "random_monotone",
                "seeds": [11, 12, 13],
                "knots": 3,
            },
            "setting.weights": [0.2, 0.3, 0.5],
        }
    )
    inst = build_instance(parse_config(raw))
    assert inst.m == 3
    assert all(v.n_total == 10 for v in inst.valuations)
