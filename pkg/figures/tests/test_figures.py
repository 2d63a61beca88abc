import numpy as np
import pandas as pd
import pytest

from firmsim_figures import (MissingScenarioError, correlations_table,
                             load_scenarios, make_figures, relative_table)
from firmsim_figures.make import make_sensitivity_figure

COLUMNS = (
    ["t", "scenario", "replicate", "sigma", "mu", "lambda", "s_max", "ego",
     "profitability"]
    + [f"profitability_{g}" for g in ("C", "O", "SE", "ST")]
    + ["satisfaction_mean"] + [f"satisfaction_{g}" for g in ("C", "O", "SE", "ST")]
    + ["homophily_mean"] + [f"homophily_{g}" for g in ("C", "O", "SE", "ST")]
    + ["verbal_warnings", "written_warnings", "cumulated_profitability",
       "relative_profitability"]
)


def write_scenario(dirpath, name, days=40, level=0.3, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(1, days + 1)
    prof = level + 0.02 * rng.standard_normal(days)
    rows = {c: np.round(rng.random(days), 6) for c in COLUMNS
            if c not in ("t", "scenario", "replicate")}
    rows["t"] = t
    rows["scenario"] = name
    rows["replicate"] = "mean"
    rows["profitability"] = prof
    rows["cumulated_profitability"] = np.cumsum(prof) / t
    df = pd.DataFrame(rows)[list(COLUMNS)]
    df.to_csv(dirpath / f"{name}_mean.csv", index=False)
    return df


ALL = ("Base", "Daily", "Monthly", "Biannually", "Yearly")


@pytest.fixture
def scenario_dir(tmp_path):
    for i, name in enumerate(ALL):
        write_scenario(tmp_path, name, level=0.3 + 0.01 * i, seed=i)
    return tmp_path


class TestLoadScenarios:
    def test_loads_all_present(self, scenario_dir):
        data = load_scenarios(scenario_dir)
        assert set(data) == set(ALL)

    def test_missing_expected_scenario_named(self, scenario_dir):
        (scenario_dir / "Yearly_mean.csv").unlink()
        with pytest.raises(MissingScenarioError) as err:
            load_scenarios(scenario_dir, expect=ALL)
        assert "Yearly" in str(err.value)
        assert err.value.missing == ["Yearly"]

    def test_base_always_required(self, tmp_path):
        write_scenario(tmp_path, "Daily")
        with pytest.raises(MissingScenarioError) as err:
            load_scenarios(tmp_path)
        assert "Base" in str(err.value)


class TestMakeFigures:
    def test_four_figures_two_tables(self, scenario_dir, tmp_path):
        out = tmp_path / "figs"
        created = make_figures(scenario_dir, out)
        pngs = [p for p in created if p.suffix == ".png"]
        csvs = [p for p in created if p.suffix == ".csv"]
        assert len(pngs) == 4 and len(csvs) == 2
        for p in created:
            assert p.exists() and p.stat().st_size > 0

    def test_base_only_input_flat_relative(self, tmp_path):
        write_scenario(tmp_path, "Base")
        out = tmp_path / "figs"
        created = make_figures(tmp_path, out)
        assert len(created) == 6
        table = pd.read_csv(out / "relative_profitability.csv",
                            dtype={"relative_profitability_pct": str})
        assert table["scenario"].tolist() == ["Base"]
        assert table["relative_profitability_pct"].tolist() == ["100.00"]

    def test_base_relative_entry_is_exactly_100(self, scenario_dir, tmp_path):
        make_figures(scenario_dir, tmp_path / "figs")
        table = pd.read_csv(tmp_path / "figs" / "relative_profitability.csv",
                            dtype={"relative_profitability_pct": str})
        base = table[table["scenario"] == "Base"]
        assert base["relative_profitability_pct"].tolist() == ["100.00"]

    def test_determinism(self, scenario_dir, tmp_path):
        make_figures(scenario_dir, tmp_path / "a")
        make_figures(scenario_dir, tmp_path / "b")
        for name in ("correlations.csv", "relative_profitability.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()


class TestTables:
    def test_correlation_rows(self, scenario_dir):
        data = load_scenarios(scenario_dir)
        table = correlations_table(data)
        assert len(table) == 5 * 4  # five groups x four adaptive scenarios
        assert set(table.columns) == {"value_group", "scenario", "SP", "HP", "SH"}
        numeric = table[["SP", "HP", "SH"]].to_numpy(dtype=float)
        finite = numeric[~np.isnan(numeric)]
        assert np.all(np.abs(finite) <= 1.0)

    def test_correlation_of_identical_series_is_one(self, tmp_path):
        for name in ALL:
            df = write_scenario(tmp_path, name)
        # overwrite one scenario so satisfaction == profitability per group
        df = pd.read_csv(tmp_path / "Daily_mean.csv")
        for g in ("C", "O", "SE", "ST"):
            df[f"satisfaction_{g}"] = df[f"profitability_{g}"]
        df.to_csv(tmp_path / "Daily_mean.csv", index=False)
        table = correlations_table(load_scenarios(tmp_path))
        daily = table[(table["scenario"] == "Daily")
                      & (table["value_group"] != "Average")]
        assert np.allclose(daily["SP"].to_numpy(dtype=float), 1.0)

    def test_relative_table_sorted_descending(self, scenario_dir):
        table = relative_table(load_scenarios(scenario_dir))
        vals = table["relative_profitability_pct"].to_numpy(dtype=float)
        assert np.all(vals[:-1] >= vals[1:])


class TestSensitivityFigure:
    def test_plot_from_manifest(self, tmp_path):
        import json
        for i, value in enumerate(("0", "0.5", "1")):
            write_scenario(tmp_path, f"sigma0={value}", seed=i)
            (tmp_path / f"sigma0={value}_mean.csv").rename(
                tmp_path / f"point{i}_mean.csv")
        manifest = {"points": [
            {"params": {"sigma0": v}, "file": f"point{i}_mean.csv"}
            for i, v in enumerate(("0", "0.5", "1"))]}
        (tmp_path / "manifest.json").write_text(json.dumps(manifest))
        out = tmp_path / "figs"
        created = make_sensitivity_figure(tmp_path, out)
        assert created[0].exists() and created[0].stat().st_size > 0

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            make_sensitivity_figure(tmp_path, tmp_path / "o")
