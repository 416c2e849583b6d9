//! The full detection pipeline over validated series.

use std::time::Instant;

use chrono::NaiveDate;
use rayon::prelude::*;
use shedad_core::anomaly::{delta_t_by_id, score_assigned_cluster, AnomalyScorecard};
use shedad_core::hier::{cut, similarity_to_dissimilarity, ward_agglomerative};
use shedad_core::knn::adaptive_knn;
use shedad_core::merge::{merge_graphs, MergedGraph};
use shedad_core::snn::{median_normalized, snn_similarity, SnnSimilarity};
use shedad_core::{ClusterAssignment, Dendrogram, DistanceMatrix, NeighborGraph, SubstationSeries};

use crate::config::{RunConfig, SnnWeights};
use crate::error::{Error, Result, StageExt};
use crate::ingest::{sample_days, segment_days, DailyProfile};
use crate::matrices::{daily_distance_matrices, euclidean_matrix};

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub ids: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub daily: Vec<DistanceMatrix>,
    pub daily_graphs: Vec<NeighborGraph>,
    pub merged: MergedGraph,
    pub similarity: SnnSimilarity,
    pub dissimilarity: DistanceMatrix,
    pub dendrogram: Dendrogram,
    pub assignment: ClusterAssignment,
    pub euclid: DistanceMatrix,
    pub scorecard: AnomalyScorecard,
}

fn timed<T>(stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f().stage(stage)?;
    log::info!("{stage}: {:.3} s", t.elapsed().as_secs_f64());
    Ok(out)
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))
}

/// Runs every stage from daily segmentation to anomaly scoring.
pub fn run_pipeline(series: &[SubstationSeries], cfg: &RunConfig) -> Result<PipelineOutput> {
    thread_pool(cfg.workers)?.install(|| run_stages(series, cfg))
}

fn run_stages(series: &[SubstationSeries], cfg: &RunConfig) -> Result<PipelineOutput> {
    let ids: Vec<String> = series.iter().map(|s| s.id.clone()).collect();
    if ids.len() < 2 {
        return Err(Error::Data(format!("need at least 2 substations, got {}", ids.len())));
    }

    let (profiles, dates) = timed("segment", || {
        let profiles: Vec<DailyProfile> = series.iter().flat_map(|s| segment_days(s, cfg.timezone)).collect();
        let mut available: Vec<NaiveDate> = profiles.iter().map(|p| p.date).collect();
        available.sort();
        available.dedup();
        log::info!("segment: {} profiles over {} complete days", profiles.len(), available.len());
        let dates = sample_days(&available, cfg.r, cfg.seed)?;
        log::info!("sample: {:?}", dates);
        Ok((profiles, dates))
    })?;

    let daily = timed("dtw", || {
        daily_distance_matrices(&ids, &profiles, &dates, cfg.band_radius, cfg.cache_dir.as_deref())
    })?;
    drop(profiles);

    let params = cfg.knn_params();
    let daily_graphs = timed("knn", || {
        let graphs: Vec<NeighborGraph> =
            daily.par_iter().map(|m| adaptive_knn(m, &params)).collect::<shedad_core::Result<_>>()?;
        for (d, g) in dates.iter().zip(&graphs) {
            let fallback = g.edges().iter().filter(|e| e.fallback).count();
            log::info!("knn {d}: {} edges, {fallback} fallback", g.edges().len());
        }
        Ok(graphs)
    })?;

    let merged = timed("merge", || {
        let merged = merge_graphs(&daily_graphs, cfg.kappa_min)?;
        if merged.degenerate {
            log::warn!("merge: every daily graph is complete and identical; keeping all edges");
        }
        log::info!(
            "merge: {} of {} candidate edges kept (chance agreement {:.4})",
            merged.graph.edges().len(),
            merged.candidates.len(),
            merged.chance_agreement
        );
        Ok(merged)
    })?;

    let similarity = timed("snn", || {
        let g = match cfg.snn_weights {
            SnnWeights::Median => median_normalized(&merged.graph),
            SnnWeights::Raw => merged.graph.clone(),
        };
        let s = snn_similarity(&g);
        if s.floored_pairs > 0 {
            log::warn!("snn: {} pair(s) had a zero denominator floored to 1e-9", s.floored_pairs);
        }
        Ok(s)
    })?;

    let dissimilarity = similarity_to_dissimilarity(&similarity.similarity);
    let dendrogram = timed("ward", || Ok(ward_agglomerative(&dissimilarity)))?;
    let assignment = timed("cut", || {
        let a = cut(&dendrogram, cfg.n_clusters, cfg.singleton_threshold)?;
        let flagged = (0..a.n_clusters()).filter(|&c| a.is_singleton(c)).count();
        log::info!("cut: {} clusters, {flagged} flagged as supply anomalies", a.n_clusters());
        Ok(a)
    })?;

    let euclid = timed("euclid", || euclidean_matrix(series))?;

    let k = cfg.comparison_k();
    let scorecard = timed("score", || {
        let stats = delta_t_by_id(series);
        let tallies: Vec<_> = (0..assignment.n_clusters())
            .into_par_iter()
            .map(|c| score_assigned_cluster(&assignment, c, &euclid, k, &stats))
            .collect::<shedad_core::Result<Vec<_>>>()?;
        let card = AnomalyScorecard::assemble(&assignment, &stats, tallies.into_iter().flatten())?;
        log::info!(
            "score: {} supply, {} performance anomalies",
            card.supply_anomalies().count(),
            card.performance_anomalies(cfg.flag_threshold).count()
        );
        Ok(card)
    })?;

    Ok(PipelineOutput {
        ids,
        dates,
        daily,
        daily_graphs,
        merged,
        similarity,
        dissimilarity,
        dendrogram,
        assignment,
        euclid,
        scorecard,
    })
}
