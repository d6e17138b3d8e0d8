"""
Main Streamlit Application.

Companion viewer for a catron output directory: −ln W heatmaps, the phase
portrait layers and the switching-rate curves. Reads files only.
"""

import json
from pathlib import Path

import pandas as pd
import plotly.express as px
import plotly.graph_objects as go
import streamlit as st


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def wigner_tab(out: Path):
    files = sorted(out.glob("neg_log_wigner_*.csv"))
    if not files:
        st.info("No Wigner maps found. Run `python -m app wigner` first.")
        return
    choice = st.selectbox("Map", files, format_func=lambda p: p.stem)
    frame = read_csv(choice)
    table = frame.pivot(index="p", columns="x", values="neg_log_W")
    fig = px.imshow(
        table.values,
        x=table.columns,
        y=table.index,
        origin="lower",
        color_continuous_scale="Viridis",
        labels={"x": "x", "y": "p", "color": "−ln W"},
    )
    cuts = out / "branch_cuts.json"
    if cuts.exists() and "potential" in choice.stem:
        for line in json.loads(cuts.read_text(encoding="utf-8")):
            xs, ps = zip(*line)
            fig.add_trace(go.Scatter(x=xs, y=ps, mode="lines", line={"color": "white"}, showlegend=False))
    locus = out / "switching_locus.csv"
    if locus.exists() and "wkb" in choice.stem:
        points = read_csv(locus)
        fig.add_trace(
            go.Scatter(x=points["x"], y=points["p"], mode="markers", marker={"size": 2}, name="switching")
        )
    st.plotly_chart(fig, use_container_width=True)


def portrait_tab(out: Path):
    path = out / "phase_portrait.csv"
    if not path.exists():
        st.info("No phase portrait found. Run `python -m app phase-portrait` first.")
        return
    flow = read_csv(path)
    scale = 0.15 / max(1e-12, float((flow["dx"] ** 2 + flow["dp"] ** 2).pow(0.5).max()))
    fig = go.Figure()
    for _, row in flow.iterrows():
        fig.add_trace(
            go.Scatter(
                x=[row.x, row.x + scale * row.dx],
                y=[row.p, row.p + scale * row.dp],
                mode="lines",
                line={"color": "gray", "width": 1},
                showlegend=False,
            )
        )
    for name, color in (("instanton_uphill.csv", "red"), ("downhill_path.csv", "blue")):
        if (out / name).exists():
            path_frame = read_csv(out / name)
            fig.add_trace(
                go.Scatter(
                    x=2**0.5 * path_frame["re_alpha"],
                    y=2**0.5 * path_frame["im_alpha"],
                    mode="lines",
                    line={"color": color},
                    name=name[:-4],
                )
            )
    points = out / "fixed_points.json"
    if points.exists():
        fixed = json.loads(points.read_text(encoding="utf-8"))["fixed_points"]
        fig.add_trace(
            go.Scatter(
                x=[2**0.5 * f["re"] for f in fixed],
                y=[2**0.5 * f["im"] for f in fixed],
                mode="markers",
                marker={"size": 10, "color": "black"},
                name="fixed points",
            )
        )
    fig.update_layout(xaxis_title="x", yaxis_title="p")
    st.plotly_chart(fig, use_container_width=True)


def rate_tab(out: Path):
    path = out / "rate_sweep.csv"
    if not path.exists():
        st.info("No rate sweep found. Run `python -m app rate` first.")
        return
    sweep = read_csv(path)
    fig = px.line(sweep, x="Delta", y="ln_rate", color="G", labels={"ln_rate": "ln Γ"})
    st.plotly_chart(fig, use_container_width=True)
    fock = out / "rate_fock.csv"
    if fock.exists():
        st.subheader("Liouvillian gaps")
        st.dataframe(read_csv(fock))


def main():
    """
    Main application function for Streamlit interface.
    """
    st.set_page_config(page_title="catron", layout="wide", initial_sidebar_state="expanded")
    st.title("catron")
    out = Path(st.sidebar.text_input("Output directory", "out"))
    if not out.is_dir():
        st.warning(f"{out} is not a directory")
        return

    wigner, portrait, rates = st.tabs(["Wigner", "Phase portrait", "Rates"])
    with wigner:
        wigner_tab(out)
    with portrait:
        portrait_tab(out)
    with rates:
        rate_tab(out)


if __name__ == "__main__":
    main()
