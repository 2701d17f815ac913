/**
 * Math rendering adapter.
 *
 * Uses a page-level typesetter (MathJax or KaTeX auto-render) when one is
 * loaded; otherwise falls back to the raw source with a warning banner.
 * A rendering failure must never block judgment entry.
 */

export interface RenderOutcome {
  rendered: boolean
  warning: string | null
}

export async function renderMath(container: HTMLElement, source: string): Promise<RenderOutcome> {
  const pre = document.createElement('pre')
  pre.className = 'proof-source'
  pre.textContent = source
  container.appendChild(pre)

  const w = window as any
  try {
    if (w.MathJax?.typesetPromise) {
      container.innerHTML = ''
      const div = document.createElement('div')
      div.className = 'proof-rendered'
      div.textContent = source
      container.appendChild(div)
      await w.MathJax.typesetPromise([div])
      return { rendered: true, warning: null }
    }
    if (w.renderMathInElement) {
      w.renderMathInElement(container)
      return { rendered: true, warning: null }
    }
  } catch (error) {
    // fall through to the raw-source fallback already in the DOM
    container.innerHTML = ''
    container.appendChild(pre)
    return { rendered: false, warning: `math rendering failed: ${String(error)}` }
  }
  return { rendered: false, warning: 'math renderer unavailable; showing raw source' }
}
