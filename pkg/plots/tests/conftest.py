import json

import pytest

pytest.importorskip("limitspec_plots")
pytest.importorskip("matplotlib")

HEADER = "# limitspec 0.1.0\n# command test\n# config 0000000000000000\n"


def write(path, text):
    path.write_text(HEADER + text if path.suffix == ".csv" else text,
                    encoding="utf-8")
    return str(path)


@pytest.fixture
def bundle(tmp_path):
    """Minimal synthetic output bundle matching the documented schemas."""
    write(tmp_path / "graph.csv",
          "kind,re,im,residual\n"
          "lambda0,0,-0.5,0\n"
          "plus,0,-0.5,1e-12\nplus,0.5,-0.25,1e-12\nplus,1,0,1e-12\n"
          "minus,0,-0.5,1e-12\nminus,-0.5,-0.25,1e-12\nminus,-1,0,1e-12\n"
          "infinity,0,-0.5,1e-12\ninfinity,0,-1.5,1e-12\n")
    write(tmp_path / "spectrum_model.csv",
          "re,im,trusted,near_defective,resolution\n"
          "0.2,-0.4,1,0,200\n-0.2,-0.4,1,0,200\n0,-0.9,0,0,200\n")
    write(tmp_path / "wkb.csv",
          "branch,k,re_mu,im_mu,residual\n"
          "plus,1,0.21,-0.39,1e-11\nminus,1,-0.21,-0.39,1e-11\n")
    rows = ["re,im,log10_norm,saturated"]
    for iy in range(4):
        for ix in range(5):
            sat = 1 if (ix, iy) == (2, 1) else 0
            rows.append(f"{-1 + 0.5 * ix},{-1.5 + 0.5 * iy},"
                        f"{1 + ix + 2 * iy},{sat}")
    write(tmp_path / "pseudo.csv", "\n".join(rows) + "\n")
    write(tmp_path / "omega.csv",
          "re,im\n1,0\n0,-0.5\n-1,0\n1,0\n")
    (tmp_path / "growth_resolvent.json").write_text(json.dumps({
        "meta": {"version": "0.1.0"},
        "lambda": [0.0, -0.2],
        "quantity": "resolvent", "norm_kind": "L2",
        "samples": [{"eps": 1 / m, "value": float(2 ** m)}
                    for m in (20, 25, 30, 40)],
        "slope": 0.6931, "intercept": 0.0, "r_squared": 1.0,
        "skipped": [{"eps": 0.02, "reason": "saturated"}],
    }), encoding="utf-8")
    return tmp_path
