use std::sync::Arc;

use futures::stream::{self, StreamExt};
use recomb_core::layout::{select_arrangement, vary_arrangement, vary_boxes};
use recomb_core::prompt::{
    parse_keyword_response, parse_layout_response, parse_recombination_response, plan_grid_crops,
    ChatRequest, DraftText, ParsedDrafts, PromptKit,
};
use recomb_core::{
    Arrangement, BBox, BlobSink, CoreError, KeywordSet, LayoutSlot, Recombination, Sketch,
    VariatorParams,
};
use recomb_providers::imaging::{crop_regions, dimensions};
use recomb_providers::{ChatReply, ProviderBundle};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, PipelineResult};
use crate::reconcile::reconcile_layout;

/// Upper bound on caption calls in flight for one image.
pub const MAX_CAPTION_CONCURRENCY: usize = 10;

/// Sketches added per "more sketches" request.
pub const DEFAULT_MORE_SKETCHES: usize = 5;

/// Result of keyword extraction for one reference image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub keywords: KeywordSet,
    pub arrangement: Option<Arrangement>,
    /// Captions that made it into the extraction prompt, grid cells first.
    pub captions: Vec<String>,
    /// Some caption or segmentation call failed.
    pub degraded: bool,
    pub issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    /// Suggested keywords, none of which was in the input.
    pub keywords: KeywordSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub drafts: Vec<Recombination>,
    /// Fewer than three drafts, or some draft needed a fallback.
    pub degraded: bool,
    pub issues: Vec<String>,
}

/// Runs the pipelines against a provider bundle and stores generated
/// images in a blob sink.
#[derive(Clone)]
pub struct Orchestrator {
    providers: ProviderBundle,
    kit: PromptKit,
    blobs: Arc<dyn BlobSink>,
    variator: VariatorParams,
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl Orchestrator {
    pub fn new(providers: ProviderBundle, blobs: Arc<dyn BlobSink>) -> Self {
        let variator = VariatorParams {
            canvas_px: providers.config.canvas_px,
            ..VariatorParams::default()
        };
        Self { providers, kit: PromptKit::default(), blobs, variator }
    }

    pub fn with_prompt_kit(mut self, kit: PromptKit) -> Self {
        self.kit = kit;
        self
    }

    /// Variator settings. With `rng_seed` set, draft `i` of a merge uses
    /// seed `rng_seed + i` and the whole pipeline is reproducible.
    pub fn with_variator(mut self, params: VariatorParams) -> Self {
        self.variator = params;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.variator.rng_seed = Some(seed);
        self
    }

    pub fn providers(&self) -> &ProviderBundle {
        &self.providers
    }

    pub fn blobs(&self) -> &Arc<dyn BlobSink> {
        &self.blobs
    }

    async fn chat(&self, stage: &'static str, req: &ChatRequest) -> PipelineResult<ChatReply> {
        let reply = self
            .providers
            .chat
            .chat(req)
            .await
            .map_err(PipelineError::provider(stage))?;
        if reply.synthetic {
            tracing::debug!(stage, "chat answer is synthetic");
        }
        Ok(reply)
    }

    /// Captions the nine grid cells and the whole image, extracts keywords
    /// from the captions, and segments the image for its arrangement.
    ///
    /// Failed caption calls are skipped (the result is flagged degraded)
    /// unless all of them fail. A failed segmentation also degrades; an
    /// empty one simply yields no arrangement.
    pub async fn extract_keywords(&self, image: &[u8], source_image: &str) -> PipelineResult<Extraction> {
        let (w, h) = dimensions(image).map_err(PipelineError::provider("decode"))?;
        let plan = plan_grid_crops(w, h)?;
        let crops = crop_regions(image, &plan.regions).map_err(PipelineError::provider("crop"))?;

        // Owned futures keep the combined future `Send` for any borrow.
        let calls: Vec<_> = crops
            .into_iter()
            .map(|crop| {
                let captioner = self.providers.captioner.clone();
                async move { captioner.caption(&crop).await }
            })
            .collect();
        let captions_fut = stream::iter(calls)
            .buffered(MAX_CAPTION_CONCURRENCY)
            .collect::<Vec<_>>();
        let segments_fut = self.providers.segmenter.segment(image);
        let (caption_results, segments) = futures::join!(captions_fut, segments_fut);

        let mut issues = Vec::new();
        let mut captions = Vec::new();
        let mut last_error = None;
        for (i, r) in caption_results.into_iter().enumerate() {
            match r.map(|c| one_line(&c)) {
                Ok(c) if !c.is_empty() => captions.push(c),
                Ok(_) => issues.push(format!("caption {i}: empty")),
                Err(e) => {
                    issues.push(format!("caption {i}: {e}"));
                    last_error = Some(e);
                }
            }
        }
        if captions.is_empty() {
            return Err(match last_error {
                Some(e) => PipelineError::Provider { stage: "caption", source: e },
                None => PipelineError::InvalidState("every caption was empty".into()),
            });
        }

        let arrangement = match segments {
            Ok(segs) if segs.is_empty() => None,
            Ok(segs) => Some(select_arrangement(source_image, self.variator.canvas_px, &segs)?),
            Err(e) => {
                issues.push(format!("segment: {e}"));
                None
            }
        };

        let req = self.kit.build_extraction_request(&captions)?;
        let reply = self.chat("extract", &req).await?;
        let keywords = parse_keyword_response(&reply.text).map_err(|e| PipelineError::parse("extract", e))?;
        Ok(Extraction {
            keywords,
            arrangement,
            captions,
            degraded: !issues.is_empty(),
            issues,
        })
    }

    /// Suggests new keywords from the given ones.
    pub async fn recommend(&self, selected: &KeywordSet) -> PipelineResult<Recommendation> {
        let req = self.kit.build_recommendation_request(selected)?;
        let reply = self.chat("recommend", &req).await?;
        let parsed = parse_keyword_response(&reply.text).map_err(|e| PipelineError::parse("recommend", e))?;
        Ok(Recommendation { keywords: parsed.without(selected) })
    }

    /// Only the text part of a merge: captions and object lists.
    pub async fn draft_texts(&self, selected: &KeywordSet) -> PipelineResult<ParsedDrafts> {
        let req = self.kit.build_recombination_request(selected)?;
        let reply = self.chat("recombine", &req).await?;
        parse_recombination_response(&reply.text).map_err(|e| PipelineError::parse("recombine", e))
    }

    /// One paraphrase per item, in order.
    pub async fn paraphrase(&self, items: &[String]) -> PipelineResult<Vec<String>> {
        let req = self.kit.build_paraphrase_request(items)?;
        let reply = self.chat("paraphrase", &req).await?;
        let lines: Vec<String> = reply
            .text
            .lines()
            .map(one_line)
            .filter(|l| !l.is_empty())
            .collect();
        if lines.len() != items.len() {
            return Err(PipelineError::Parse {
                stage: "paraphrase",
                message: format!("expected {} lines, got {}", items.len(), lines.len()),
                raw: reply.text,
            });
        }
        Ok(lines)
    }

    /// Turns the selected keywords into up to three drafts, each with a
    /// layout, its ranked alternatives and one sketch. `draft_ids` names
    /// the drafts in order and must hold at least three ids.
    ///
    /// With an arrangement, layouts are varied from it and the model
    /// assigns objects to the best candidate; otherwise, or when that
    /// fails, the model lays the objects out itself. A draft whose layout
    /// cannot be obtained either way, or whose image fails, is dropped.
    pub async fn merge(
        &self,
        selected: &KeywordSet,
        arrangement: Option<&Arrangement>,
        draft_ids: &[String],
    ) -> PipelineResult<MergeOutcome> {
        let parsed = self.draft_texts(selected).await?;
        if draft_ids.len() < parsed.drafts.len() {
            return Err(CoreError::invalid(format!(
                "{} draft ids for {} drafts",
                draft_ids.len(),
                parsed.drafts.len()
            ))
            .into());
        }
        let mut issues = parsed.issues.clone();
        let jobs = parsed
            .drafts
            .iter()
            .zip(draft_ids)
            .enumerate()
            .map(|(i, (text, id))| self.build_draft(i, id, text, arrangement));
        let results = futures::future::join_all(jobs).await;

        let mut drafts = Vec::new();
        let mut fell_back = false;
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok((draft, draft_issues)) => {
                    fell_back |= !draft_issues.is_empty();
                    issues.extend(draft_issues.into_iter().map(|m| format!("draft {}: {m}", i + 1)));
                    drafts.push(draft);
                }
                Err(e) => issues.push(format!("draft {} dropped: {e}", i + 1)),
            }
        }
        if drafts.is_empty() {
            return Err(PipelineError::NoDrafts(issues));
        }
        let degraded = parsed.degraded || fell_back || drafts.len() < 3;
        Ok(MergeOutcome { drafts, degraded, issues })
    }

    fn params_for(&self, index: usize) -> VariatorParams {
        let mut p = self.variator.clone();
        p.rng_seed = p.rng_seed.map(|s| s.wrapping_add(index as u64));
        p
    }

    async fn build_draft(
        &self,
        index: usize,
        id: &str,
        text: &DraftText,
        arrangement: Option<&Arrangement>,
    ) -> PipelineResult<(Recombination, Vec<String>)> {
        let names: Vec<String> = text.objects.iter().map(|o| o.name.clone()).collect();
        if names.is_empty() {
            return Err(PipelineError::InvalidState("draft lists no objects".into()));
        }
        let params = self.params_for(index);
        let mut issues = Vec::new();

        let matched = match arrangement {
            Some(arr) => {
                let ranked: Vec<Vec<BBox>> = vary_arrangement(arr, names.len(), &params)?
                    .into_iter()
                    .map(|r| r.boxes)
                    .collect();
                match self.match_layout(&text.caption, &names, &ranked[0]).await {
                    Ok(slots) => Some((slots, ranked)),
                    Err(e) => {
                        issues.push(format!("layout matching failed, generating instead: {e}"));
                        None
                    }
                }
            }
            None => None,
        };
        let (slots, ranked) = match matched {
            Some(found) => found,
            None => self.generate_layout(&text.caption, &names, &params).await?,
        };

        let blob = self.render(&text.caption, &slots).await?;
        let mut draft = Recombination::new(id, text.caption.clone(), text.objects.clone());
        draft.sketches.push(Sketch { rank: 0, layout_index: 0, blob, layout: slots.clone() });
        draft.layout = Some(slots);
        draft.ranked_layouts = ranked;
        draft.layout_rank_used = 0;
        draft.check_layout().map_err(PipelineError::InvalidState)?;
        Ok((draft, issues))
    }

    async fn match_layout(&self, caption: &str, names: &[String], boxes: &[BBox]) -> PipelineResult<Vec<LayoutSlot>> {
        let req = self.kit.build_layout_match_request(caption, names, boxes)?;
        let reply = self.chat("match_layout", &req).await?;
        let entries = parse_layout_response(&reply.text).map_err(|e| PipelineError::parse("match_layout", e))?;
        reconcile_layout(names, &entries).ok_or_else(|| PipelineError::Parse {
            stage: "match_layout",
            message: format!("{} boxes for {} objects", entries.len(), names.len()),
            raw: reply.text,
        })
    }

    /// Model-generated layout, ranked first, followed by variations of it.
    async fn generate_layout(
        &self,
        caption: &str,
        names: &[String],
        params: &VariatorParams,
    ) -> PipelineResult<(Vec<LayoutSlot>, Vec<Vec<BBox>>)> {
        let req = self.kit.build_layout_gen_request(caption, names)?;
        let reply = self.chat("gen_layout", &req).await?;
        let entries = parse_layout_response(&reply.text).map_err(|e| PipelineError::parse("gen_layout", e))?;
        let slots = reconcile_layout(names, &entries).ok_or_else(|| PipelineError::Parse {
            stage: "gen_layout",
            message: format!("{} boxes for {} objects", entries.len(), names.len()),
            raw: reply.text.clone(),
        })?;
        let generated: Vec<BBox> = slots.iter().map(|s| s.bbox).collect();
        let mut ranked = vec![generated.clone()];
        let variations = vary_boxes(&generated, names.len(), params)?;
        ranked.extend(
            variations
                .into_iter()
                .map(|r| r.boxes)
                .take(params.top_k.saturating_sub(1)),
        );
        Ok((slots, ranked))
    }

    async fn render(&self, caption: &str, slots: &[LayoutSlot]) -> PipelineResult<recomb_core::BlobId> {
        let image = self
            .providers
            .generator
            .generate_image(caption, slots)
            .await
            .map_err(PipelineError::provider("generate_image"))?;
        let sketch = self
            .providers
            .stylizer
            .stylize_sketch(&image)
            .await
            .map_err(PipelineError::provider("stylize_sketch"))?;
        Ok(self.blobs.put(&sketch)?)
    }

    /// Sketches for the next `count` layout ranks of a draft, cycling
    /// through its ranked layouts. The caller appends them to the draft.
    ///
    /// Objects are re-assigned to each rank's boxes by the model, falling
    /// back to list order when that fails.
    pub async fn more_sketches(&self, draft: &Recombination, count: usize) -> PipelineResult<Vec<Sketch>> {
        if draft.ranked_layouts.is_empty() {
            return Err(PipelineError::InvalidState(format!(
                "draft {} has no ranked layouts",
                draft.id
            )));
        }
        let names = draft.object_names();
        let last = draft.sketches.iter().map(|s| s.rank).max().unwrap_or(0);
        let jobs = (1..=count).map(|k| {
            let rank = last + k;
            let layout_index = rank % draft.ranked_layouts.len();
            let boxes = &draft.ranked_layouts[layout_index];
            let names = &names;
            async move {
                let slots = match (&draft.layout, layout_index) {
                    (Some(layout), 0) => layout.clone(),
                    _ => match self.match_layout(&draft.caption, names, boxes).await {
                        Ok(slots) => slots,
                        Err(e) => {
                            tracing::debug!(rank, error = %e, "positional assignment");
                            names
                                .iter()
                                .zip(boxes)
                                .map(|(n, b)| LayoutSlot { object_name: n.clone(), bbox: *b })
                                .collect()
                        }
                    },
                };
                let blob = self.render(&draft.caption, &slots).await?;
                Ok(Sketch { rank, layout_index, blob, layout: slots })
            }
        });
        futures::future::join_all(jobs).await.into_iter().collect()
    }
}
