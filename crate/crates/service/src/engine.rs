//! The pipeline shared by the HTTP API and the CLI.

use copaint_core::affect::{build_generic_table, category_of, quadrant_of, ElementAffectTable, EmotionCategory, VaPoint};
use copaint_core::canvas::{HueAreas, Raster, Region};
use copaint_core::lexicon::Lexicon;
use copaint_core::lines::LineStats;
use copaint_core::metaphor::{
    analysis_from_measurements, analyze_turn, choose_group_metaphor, MetaphorConfig, MetaphorDecision, MetaphorError,
    MetaphorMode, ModePreference, TurnAnalysis, TurnHistory,
};
use copaint_core::sketch::{
    apply_stroke, compose_abstract, compose_representational, plan_strokes, rasterize, AssetLibrary, SketchError,
    StrokePlan, StrokeSet, VectorComposition,
};
use copaint_core::user_model::taxonomy::slugify;
use copaint_core::user_model::{DisclosureForm, ElementVotes, Profile, UserModelError, DISCLOSED_ROOT};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::session::{Feedback, InvalidTransition, RobotResponse, Session, SessionEvent, SessionState, TurnRecord};
use crate::store::{ProfileStore, StoreError};

/// Supersampling used to rasterize compositions; the stroke planner's
/// coverage model assumes the same factor.
const SUPERSAMPLE: u32 = 2;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Transition(#[from] InvalidTransition),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    BadRequest(String),
    #[error("session `{0}` not found")]
    SessionNotFound(String),
    /// A pipeline stage failed; `rationale` holds the trace up to that point.
    #[error("{stage} failed: {message}")]
    Pipeline {
        stage: &'static str,
        message: String,
        rationale: Vec<String>,
    },
}

impl ServiceError {
    fn pipeline(stage: &'static str, message: impl ToString, rationale: &[String]) -> Self {
        ServiceError::Pipeline {
            stage,
            message: message.to_string(),
            rationale: rationale.to_vec(),
        }
    }
}

/// A composition together with the strokes that realize it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Rendering {
    pub decision: MetaphorDecision,
    pub composition: VectorComposition,
    pub stroke_plan: StrokePlan,
}

#[derive(Debug)]
pub struct Engine {
    pub config: Config,
    pub generic: ElementAffectTable,
    pub lexicon: Lexicon,
    pub assets: AssetLibrary,
}

impl Engine {
    pub fn new(config: Config) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self {
            lexicon: config.load_lexicon()?,
            assets: config.load_assets()?,
            generic: build_generic_table(),
            config,
        })
    }

    pub fn metaphor_config(&self, mode: ModePreference) -> MetaphorConfig {
        MetaphorConfig {
            min_concreteness: self.config.min_concreteness,
            params: self.config.update_params,
            mode,
            ..MetaphorConfig::default()
        }
    }

    pub fn robot_region(&self, width: u32, height: u32) -> Region {
        self.config
            .robot_region
            .unwrap_or_else(|| Region::right_half(width, height))
            .clip(width, height)
    }

    /// The largest canvas strip beside the robot's region.
    pub fn human_region(&self, width: u32, height: u32) -> Region {
        let r = self.robot_region(width, height);
        let strips = [
            Region { x: 0, y: 0, width: r.x, height },
            Region { x: r.x + r.width, y: 0, width: width - (r.x + r.width), height },
            Region { x: 0, y: 0, width, height: r.y },
            Region { x: 0, y: r.y + r.height, width, height: height - (r.y + r.height) },
        ];
        strips
            .into_iter()
            .max_by_key(|s| (s.width as u64 * s.height as u64, std::cmp::Reverse(s.x + s.y)))
            .filter(|s| s.width > 0 && s.height > 0)
            .unwrap_or(Region { x: 0, y: 0, width, height })
    }

    /// An analysis with the inferred point set directly, for requests that
    /// name a target emotion instead of supplying a canvas.
    pub fn analysis_at(&self, target: VaPoint, declared: &[String], profile: &Profile) -> Result<TurnAnalysis, UserModelError> {
        let mut analysis = analysis_from_measurements(
            HueAreas::from_fractions([0.0; 9], 0.5),
            LineStats::default(),
            declared,
            profile,
            &self.generic,
            &self.config.inference_weights,
        )?;
        analysis.inferred = target;
        analysis.category = category_of(target);
        Ok(analysis)
    }

    pub fn decide(
        &self,
        analysis: &TurnAnalysis,
        profiles: &[Profile],
        history: &TurnHistory,
        mode: ModePreference,
    ) -> Result<MetaphorDecision, MetaphorError> {
        choose_group_metaphor(analysis, profiles, &self.lexicon, history, &self.generic, &self.metaphor_config(mode))
    }

    /// Composes the decision for a `current` region and plans the strokes
    /// that paint it. A concept without clip art is painted abstractly,
    /// aiming at the concept's affect.
    pub fn render(
        &self,
        analysis: &TurnAnalysis,
        decision: MetaphorDecision,
        profiles: &[Profile],
        history: &TurnHistory,
        current: &Raster,
        seed: u64,
    ) -> Result<Rendering, ServiceError> {
        let (w, h) = (current.width(), current.height());
        let mut decision = decision;
        let composition = match (&decision.concept, &decision.recipe) {
            (_, Some(recipe)) => compose_abstract(recipe, w, h, seed),
            (Some(concept), None) => match compose_representational(concept, &self.assets, w, h) {
                Ok(c) => c,
                Err(SketchError::MissingAsset(_)) => {
                    let mut aimed = analysis.clone();
                    aimed.inferred = decision.predicted_affect;
                    aimed.category = category_of(decision.predicted_affect);
                    let fallback = self
                        .decide(&aimed, profiles, history, ModePreference::Abstract)
                        .map_err(|e| ServiceError::pipeline("abstract fallback", e, &decision.rationale))?;
                    let mut rationale = decision.rationale.clone();
                    rationale.push(format!(
                        "no clip art for {concept}; painting abstractly toward its affect {}",
                        decision.predicted_affect
                    ));
                    rationale.extend(fallback.rationale.last().cloned());
                    let recipe = fallback.recipe.expect("abstract decisions carry a recipe");
                    let comp = compose_abstract(&recipe, w, h, seed);
                    decision = MetaphorDecision {
                        mode: MetaphorMode::Abstract,
                        concept: decision.concept.clone(),
                        recipe: Some(recipe),
                        predicted_affect: fallback.predicted_affect,
                        rationale,
                    };
                    comp
                }
                Err(e) => return Err(ServiceError::pipeline("compose", e, &decision.rationale)),
            },
            (None, None) => return Err(ServiceError::pipeline("compose", "empty decision", &decision.rationale)),
        };
        let target = rasterize(&composition, SUPERSAMPLE);
        let set = StrokeSet::for_canvas(w, h, composition.palette());
        let stroke_plan = plan_strokes(&target, current, self.config.stroke_budget, &set)
            .map_err(|e| ServiceError::pipeline("stroke planning", e, &decision.rationale))?;
        decision.rationale.push(format!(
            "planned {} of at most {} strokes, residual error {:.1}",
            stroke_plan.strokes.len(),
            stroke_plan.budget,
            stroke_plan.residual_error
        ));
        Ok(Rendering {
            decision,
            composition,
            stroke_plan,
        })
    }

    /// Runs the robot's turn: analyze the human's region, choose a metaphor,
    /// compose it in the robot's region and plan the strokes. On success the
    /// strokes are painted onto the session canvas and the session waits for
    /// feedback. A failed turn leaves the session in `RobotTurn` so it can be
    /// retried.
    pub fn run_robot_turn(
        &self,
        session: &mut Session,
        profiles: &[Profile],
        declared: &[String],
    ) -> Result<RobotResponse, ServiceError> {
        session.expect(SessionEvent::ResponseReady)?;
        let canvas = session
            .canvas
            .as_ref()
            .ok_or_else(|| ServiceError::BadRequest("no canvas uploaded for this session".into()))?;
        let primary = profiles
            .first()
            .ok_or_else(|| ServiceError::BadRequest("session has no profiles".into()))?;
        let (w, h) = (canvas.width(), canvas.height());
        let human = canvas.crop(self.human_region(w, h));
        let region = self.robot_region(w, h);
        if region.width == 0 || region.height == 0 {
            return Err(ServiceError::BadRequest(format!("robot region is empty on a {w}x{h} canvas")));
        }

        let analysis = analyze_turn(&human, declared, primary, &self.generic, &self.config.inference_weights)
            .map_err(|e| ServiceError::pipeline("analysis", e, &[]))?;
        let decision = self
            .decide(&analysis, profiles, &session.painted, ModePreference::Auto)
            .map_err(|e| ServiceError::pipeline("metaphor", e, &[]))?;
        let seed = self.config.seed.wrapping_add(session.turn_count as u64);
        let current = canvas.crop(region);
        let mut rendering = self.render(&analysis, decision, profiles, &session.painted, &current, seed)?;
        rendering.stroke_plan.translate(region.x as f64, region.y as f64);

        let mut painted = canvas.clone();
        for stroke in &rendering.stroke_plan.strokes {
            apply_stroke(&mut painted, stroke);
        }
        session.canvas = Some(painted);
        session.painted.record(&rendering.decision);
        let response = RobotResponse {
            analysis,
            decision: rendering.decision,
            stroke_plan: rendering.stroke_plan,
        };
        session.history.push(TurnRecord {
            response: response.clone(),
            feedback: None,
        });
        session.turn_count += 1;
        session.advance(SessionEvent::ResponseReady)?;
        Ok(response)
    }

    /// Moves what the last response painted towards the rated reaction, for
    /// every profile of the session, and persists the result.
    pub fn record_feedback(
        &self,
        session: &mut Session,
        feedback: Feedback,
        store: &ProfileStore,
    ) -> Result<Vec<Profile>, ServiceError> {
        session.expect(SessionEvent::Feedback)?;
        let decision = session
            .history
            .last()
            .map(|r| r.response.decision.clone())
            .ok_or_else(|| ServiceError::BadRequest("no robot turn to rate".into()))?;
        let mut updated = Vec::with_capacity(session.profile_ids.len());
        for id in &session.profile_ids {
            let profile = store.update(id, |current| {
                let profile = current.ok_or_else(|| StoreError::NotFound(id.clone()))?;
                self.apply_feedback(&profile, &decision, feedback.mapped)
                    .map_err(|e| ServiceError::pipeline("feedback", e, &decision.rationale))
            })?;
            updated.push(profile);
        }
        if let Some(record) = session.history.last_mut() {
            record.feedback = Some(feedback);
        }
        session.advance(SessionEvent::Feedback)?;
        Ok(updated)
    }

    /// A rated recipe moves its element overrides; a rated concept moves its
    /// taxonomy node. A lexicon word the profile does not know yet is filed
    /// under the disclosure root first, seeded with its rated norm.
    pub fn apply_feedback(
        &self,
        profile: &Profile,
        decision: &MetaphorDecision,
        reaction: VaPoint,
    ) -> Result<Profile, UserModelError> {
        let params = &self.config.update_params;
        if let Some(recipe) = &decision.recipe {
            let elements: Vec<_> = recipe.elements.iter().map(|e| e.element).collect();
            return profile.apply_element_reaction(&elements, &self.generic, reaction, params);
        }
        let concept = decision.concept.as_deref().ok_or(UserModelError::NoCandidate)?;
        if profile.taxonomy.contains(concept) {
            return profile.apply_reaction(concept, reaction, params);
        }
        let category = category_of(decision.predicted_affect);
        let path = format!("{DISCLOSED_ROOT}/{}/{}", category.name(), slugify(concept));
        let mut next = profile.clone();
        if !next.taxonomy.contains(&path) {
            next.taxonomy.insert_leaf(&path, decision.predicted_affect)?;
        }
        next.apply_reaction(&path, reaction, params)
    }

    /// One study image: the response to an emotion's quadrant centre for a
    /// profile that has no personal data yet.
    pub fn study_rendering(
        &self,
        emotion: EmotionCategory,
        mode: MetaphorMode,
        width: u32,
        height: u32,
    ) -> Result<Rendering, ServiceError> {
        let profile = match mode {
            MetaphorMode::Abstract => Profile::empty("study"),
            MetaphorMode::Representational => Profile::new("study", copaint_core::user_model::demo_taxonomy()),
        };
        let preference = match mode {
            MetaphorMode::Abstract => ModePreference::Abstract,
            MetaphorMode::Representational => ModePreference::Auto,
        };
        let profiles = [profile];
        let analysis = self
            .analysis_at(quadrant_of(emotion), &[], &profiles[0])
            .map_err(|e| ServiceError::pipeline("analysis", e, &[]))?;
        let history = TurnHistory::default();
        let decision = self
            .decide(&analysis, &profiles, &history, preference)
            .map_err(|e| ServiceError::pipeline("metaphor", e, &[]))?;
        let blank = Raster::blank(width, height);
        self.render(&analysis, decision, &profiles, &history, &blank, self.config.seed)
    }

    /// A complete single-turn session, as used by the CLI.
    pub fn single_turn(
        &self,
        canvas: Raster,
        profiles: &[Profile],
        declared: &[String],
    ) -> Result<RobotResponse, ServiceError> {
        let ids = profiles.iter().map(|p| p.id.clone()).collect();
        let mut session = Session::new("cli", ids, self.config.history_capacity);
        session.canvas = Some(canvas);
        session.advance(SessionEvent::EndTurn)?;
        let response = self.run_robot_turn(&mut session, profiles, declared)?;
        debug_assert_eq!(session.state, SessionState::AwaitingFeedback);
        Ok(response)
    }
}

/// Disclosure form as posted by clients: free-text labels per emotion plus
/// per-element emotion votes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisclosureRequest {
    pub happy: Vec<String>,
    pub relaxed: Vec<String>,
    pub sad: Vec<String>,
    pub angry: Vec<String>,
    pub elements: ElementVotes,
}

impl DisclosureRequest {
    pub fn form(&self) -> DisclosureForm {
        let mut form = DisclosureForm::new();
        for (emotion, labels) in [
            (EmotionCategory::Happy, &self.happy),
            (EmotionCategory::Relaxed, &self.relaxed),
            (EmotionCategory::Sad, &self.sad),
            (EmotionCategory::Angry, &self.angry),
        ] {
            if !labels.is_empty() {
                form.insert(emotion, labels.clone());
            }
        }
        form
    }

    pub fn apply(&self, profile: &Profile) -> Profile {
        profile.ingest_disclosure(&self.form(), &self.elements)
    }
}

/// A fresh profile for a new id: the population taxonomy with no personal data.
pub fn new_profile(id: &str) -> Profile {
    Profile::new(id, copaint_core::user_model::demo_taxonomy())
}
