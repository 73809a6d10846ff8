export interface ActorDoc {
  id: string;
  name: string;
  role: string;
}

export interface Rating {
  band: string;
  decisionBasis: string;
  timelineMonths: number;
}

export interface Treatment {
  strategy: string;
  rationale: string;
  controls: string[];
  status: string;
  dueDate: string;
}

export interface RiskEntry {
  id: string;
  cycleId: string;
  assetId: string;
  threatId: string;
  vulnerabilityId: string;
  impact: number;
  likelihood: number;
  businessLoss: number;
  baseScore: number;
  baseRating: Rating;
  residualScore?: number;
  createdAt: string;
  treatment?: Treatment;
  ownerApproval?: { actor: ActorDoc; at: string; medium: string };
}

export interface PortfolioHealth {
  band: string;
  percent: number;
}

/** Server-computed what-if result; the client never re-derives any of it. */
export interface Projection {
  riskId: string;
  impact: number;
  likelihood: number;
  score: number;
  rating: Rating;
  portfolioHealth: PortfolioHealth;
}

export interface NcStep {
  step: number;
  actor: ActorDoc;
  at: string;
  evidence: string;
  riskReviewRef?: string;
}

export interface NcExtension {
  requestedAt: string;
  justification: string;
  newDeadline: string;
  notifiedCISO: boolean;
}

export interface Nonconformity {
  id: string;
  description: string;
  source: string;
  reportedBy: ActorDoc;
  reportedAt: string;
  deadline: string;
  currentStep: number;
  steps: NcStep[];
  extensions: NcExtension[];
  status: "Open" | "Closed" | "Dispensed";
  dispensation?: { approver: ActorDoc; at: string; reason: string };
}

export interface DeadlineRow {
  recordId: string;
  state: "OnTrack" | "Overdue";
}

export interface OverdueReport {
  today: string;
  deadlines: DeadlineRow[];
  escalations: string[];
  containmentWarnings: string[];
}
